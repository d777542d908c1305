use std::collections::BTreeMap;

use rayon::prelude::*;

use super::{Graph, NodeId, UserItemMap};
use crate::error::{Error, Result};
use crate::ingest::{extract_domain, TweetRecord, UrlExpansionMap};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BuildOptions {
    /// When set, a user with more distinct items than this contributes only
    /// their most frequent `cap` items to the clique (the user map still
    /// lists every item). Unset by default: power users can create quadratic
    /// edge blowup, but truncation changes the network.
    pub max_items_per_user: Option<usize>,
}

/// Per-user item occurrence counts, from which a co-occurrence network is
/// formed by joining every pair of distinct items a user produced.
#[derive(Debug, Clone, Default)]
pub struct CooccurrenceAccumulator {
    per_user: BTreeMap<String, BTreeMap<String, usize>>,
}

impl CooccurrenceAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, user: &str, item: &str) {
        *self
            .per_user
            .entry(user.to_string())
            .or_default()
            .entry(item.to_string())
            .or_insert(0) += 1;
    }

    pub fn user_count(&self) -> usize {
        self.per_user.len()
    }

    /// Items of one user, most frequent first, ties by name.
    pub fn ranked_items(&self, user: &str) -> Vec<(&str, usize)> {
        self.per_user.get(user).map(rank).unwrap_or_default()
    }

    pub fn build(&self, opts: BuildOptions) -> Result<Graph> {
        let mut vocab: Vec<String> = self
            .per_user
            .values()
            .flat_map(|items| items.keys().cloned())
            .collect();
        vocab.sort_unstable();
        vocab.dedup();
        if vocab.is_empty() {
            return Err(Error::EmptyGraph("no items to build a co-occurrence network from".into()));
        }
        let lookup = |name: &str| vocab.binary_search_by(|v| v.as_str().cmp(name)).unwrap() as NodeId;

        let mut user_items = UserItemMap::new();
        let mut edges: Vec<(NodeId, NodeId)> = Vec::new();
        for (user, items) in &self.per_user {
            let ranked: Vec<NodeId> = rank(items).into_iter().map(|(name, _)| lookup(name)).collect();
            let clique = match opts.max_items_per_user {
                Some(cap) => &ranked[..ranked.len().min(cap)],
                None => &ranked[..],
            };
            for (i, &a) in clique.iter().enumerate() {
                for &b in &clique[i + 1..] {
                    edges.push((a.min(b), a.max(b)));
                }
            }
            user_items.insert(user.clone(), ranked);
        }
        edges.sort_unstable();
        edges.dedup();
        Graph::from_index_edges(false, vocab, edges)?.with_user_items(user_items)
    }
}

fn rank(items: &BTreeMap<String, usize>) -> Vec<(&str, usize)> {
    let mut ranked: Vec<(&str, usize)> = items.iter().map(|(k, &v)| (k.as_str(), v)).collect();
    // BTreeMap iteration is already name-ordered; the stable sort keeps that
    // as the tie-break.
    ranked.sort_by(|a, b| b.1.cmp(&a.1));
    ranked
}

/// Below this many domains the network is likely too small to embed.
const MIN_EXPECTED_DOMAINS: usize = 10;

/// Domain co-occurrence network: two domains are joined when the same user
/// retweeted URLs from both, in one retweet or in separate ones. Only records
/// that are retweets contribute.
pub fn build_domain_cooccurrence(
    records: &[TweetRecord],
    expansion: &UrlExpansionMap,
    opts: BuildOptions,
) -> Result<Graph> {
    let per_record: Vec<Vec<String>> = records
        .par_iter()
        .map(|r| {
            if !r.is_retweet() {
                return Vec::new();
            }
            r.urls
                .iter()
                .filter_map(|u| extract_domain(u, expansion))
                .map(|d| d.into_string())
                .collect()
        })
        .collect();
    let mut acc = CooccurrenceAccumulator::new();
    let mut dropped = 0usize;
    let mut unused = 0usize;
    for (r, domains) in records.iter().zip(&per_record) {
        if r.is_retweet() {
            dropped += r.urls.len() - domains.len();
        } else {
            unused += r.urls.len();
        }
        for d in domains {
            acc.add(&r.user_id, d);
        }
    }
    if dropped > 0 {
        log::info!("{dropped} retweeted URLs were dead or unparseable");
    }
    let graph = acc.build(opts).map_err(|e| match e {
        Error::EmptyGraph(_) => Error::EmptyGraph("no resolvable domains in retweets".into()),
        e => e,
    })?;
    if graph.node_count() < MIN_EXPECTED_DOMAINS && unused > 0 {
        log::warn!(
            "only {} domains from retweets; {unused} URLs in original tweets were not used",
            graph.node_count()
        );
    }
    Ok(graph)
}

/// Hashtag co-occurrence network: two (lower-cased) hashtags are joined when
/// the same user used both in any of their tweets.
pub fn build_hashtag_cooccurrence(records: &[TweetRecord], opts: BuildOptions) -> Result<Graph> {
    let mut acc = CooccurrenceAccumulator::new();
    for r in records {
        for tag in &r.hashtags {
            let tag = tag.trim_start_matches('#').to_lowercase();
            if !tag.is_empty() {
                acc.add(&r.user_id, &tag);
            }
        }
    }
    acc.build(opts).map_err(|e| match e {
        Error::EmptyGraph(_) => Error::EmptyGraph("no hashtags in the corpus".into()),
        e => e,
    })
}

/// Undirected retweet network over user ids; repeated retweets collapse to
/// one edge and self-retweets are dropped.
pub fn build_retweet_network(records: &[TweetRecord]) -> Result<Graph> {
    let edges: Vec<(&str, &str)> = records
        .iter()
        .filter_map(|r| {
            let target = r.retweeted_user_id.as_deref()?;
            (target != r.user_id).then_some((r.user_id.as_str(), target))
        })
        .collect();
    if edges.is_empty() {
        return Err(Error::EmptyGraph("no retweet edges".into()));
    }
    Ok(Graph::from_named_edges(false, Vec::<&str>::new(), edges))
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use proptest::prelude::*;

    use super::*;

    fn rt(id: &str, user: &str, urls: &[&str]) -> TweetRecord {
        TweetRecord {
            tweet_id: id.into(),
            user_id: user.into(),
            text: String::new(),
            hashtags: vec![],
            retweeted_user_id: Some("src".into()),
            urls: urls.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn tags(id: &str, user: &str, tags: &[&str]) -> TweetRecord {
        TweetRecord {
            tweet_id: id.into(),
            user_id: user.into(),
            text: String::new(),
            hashtags: tags.iter().map(|s| s.to_string()).collect(),
            retweeted_user_id: None,
            urls: vec![],
        }
    }

    fn named_edges(g: &Graph) -> Vec<(String, String)> {
        g.edges()
            .map(|(a, b)| (g.name(a).to_string(), g.name(b).to_string()))
            .collect()
    }

    fn pair(a: &str, b: &str) -> (String, String) {
        (a.to_string(), b.to_string())
    }

    #[test]
    fn distant_retweets_cooccur() {
        let recs = [
            rt("1", "u", &["https://www.nytimes.com/a"]),
            rt("2", "u", &["https://www.washingtonpost.com/b"]),
        ];
        let g = build_domain_cooccurrence(&recs, &UrlExpansionMap::new(), BuildOptions::default())
            .unwrap();
        assert_eq!(named_edges(&g), vec![pair("nytimes.com", "washingtonpost.com")]);
    }

    #[test]
    fn single_domain_is_isolated() {
        let recs = [rt("1", "u", &["https://rt.com/x"]), rt("2", "u", &["https://rt.com/y"])];
        let g = build_domain_cooccurrence(&recs, &UrlExpansionMap::new(), BuildOptions::default())
            .unwrap();
        assert_eq!(g.node_count(), 1);
        assert_eq!(g.degree(0), 0);
        assert_eq!(g.user_items().unwrap().get("u"), Some(&[0][..]));
    }

    #[test]
    fn non_retweets_and_dead_links_do_not_count() {
        let mut original = rt("1", "u", &["https://cnn.com"]);
        original.retweeted_user_id = None;
        let mut map = UrlExpansionMap::new();
        map.insert_miss("https://bit.ly/dead").unwrap();
        let recs = [original, rt("2", "u", &["https://bit.ly/dead"])];
        let err = build_domain_cooccurrence(&recs, &map, BuildOptions::default()).unwrap_err();
        assert!(matches!(err, Error::EmptyGraph(_)));
    }

    #[test]
    fn clique_closure_matches_brute_force() {
        let recs = [
            rt("1", "u", &["http://a.com", "http://b.com"]),
            rt("2", "u", &["http://c.com"]),
            rt("3", "v", &["http://b.com", "http://c.com"]),
        ];
        let g = build_domain_cooccurrence(&recs, &UrlExpansionMap::new(), BuildOptions::default())
            .unwrap();
        // brute force: every unordered pair of distinct items per user
        let mut expected = BTreeSet::new();
        let users: BTreeSet<&str> = recs.iter().map(|r| r.user_id.as_str()).collect();
        for u in users {
            let items: BTreeSet<String> = recs
                .iter()
                .filter(|r| r.user_id == u)
                .flat_map(|r| r.urls.iter().map(|s| s.trim_start_matches("http://").to_string()))
                .collect();
            for a in &items {
                for b in &items {
                    if a < b {
                        expected.insert((a.clone(), b.clone()));
                    }
                }
            }
        }
        assert_eq!(named_edges(&g), expected.into_iter().collect::<Vec<_>>());
        assert_eq!(g.edge_count(), 3);
    }

    #[test]
    fn user_map_is_frequency_ordered() {
        let recs = [
            rt("1", "u", &["http://b.com", "http://a.com"]),
            rt("2", "u", &["http://c.com", "http://c.com"]),
            rt("3", "u", &["http://b.com"]),
        ];
        let g = build_domain_cooccurrence(&recs, &UrlExpansionMap::new(), BuildOptions::default())
            .unwrap();
        let names: Vec<&str> = g.user_items().unwrap().get("u").unwrap().iter().map(|&i| g.name(i)).collect();
        assert_eq!(names, ["b.com", "c.com", "a.com"]);
    }

    #[test]
    fn cap_limits_clique_but_not_map() {
        let recs = [rt("1", "u", &["http://a.com", "http://b.com", "http://c.com", "http://a.com"])];
        let opts = BuildOptions { max_items_per_user: Some(2) };
        let g = build_domain_cooccurrence(&recs, &UrlExpansionMap::new(), opts).unwrap();
        assert_eq!(named_edges(&g), vec![pair("a.com", "b.com")]);
        assert_eq!(g.user_items().unwrap().get("u").unwrap().len(), 3);
    }

    #[test]
    fn hashtag_example() {
        let recs = [tags("1", "u", &["QAnon", "COVID19"]), tags("2", "u", &["#Biden", "COVID19"])];
        let g = build_hashtag_cooccurrence(&recs, BuildOptions::default()).unwrap();
        assert_eq!(
            named_edges(&g),
            vec![pair("biden", "covid19"), pair("biden", "qanon"), pair("covid19", "qanon")]
        );
    }

    #[test]
    fn hashtag_edge_cases() {
        let g = build_hashtag_cooccurrence(&[tags("1", "u", &["solo"])], BuildOptions::default()).unwrap();
        assert_eq!((g.node_count(), g.edge_count()), (1, 0));
        let err = build_hashtag_cooccurrence(&[tags("1", "u", &[])], BuildOptions::default()).unwrap_err();
        assert!(matches!(err, Error::EmptyGraph(_)));
    }

    fn retweet(user: &str, target: &str) -> TweetRecord {
        let mut r = rt("x", user, &[]);
        r.retweeted_user_id = Some(target.into());
        r
    }

    #[test]
    fn retweet_network_cases() {
        let g = build_retweet_network(&[retweet("u1", "u2"), retweet("u1", "u2")]).unwrap();
        assert_eq!(g.edge_count(), 1);
        assert!(matches!(
            build_retweet_network(&[retweet("u1", "u1")]),
            Err(Error::EmptyGraph(_))
        ));
        let g = build_retweet_network(&[retweet("u1", "u2"), retweet("u2", "u3")]).unwrap();
        assert_eq!((g.node_count(), g.edge_count()), (3, 2));
        assert_eq!(named_edges(&g), vec![pair("u1", "u2"), pair("u2", "u3")]);
    }

    fn corpus() -> impl Strategy<Value = Vec<TweetRecord>> {
        prop::collection::vec(
            (0..6usize, prop::collection::vec(0..8usize, 0..4)),
            1..25,
        )
        .prop_map(|rows| {
            rows.into_iter()
                .enumerate()
                .map(|(i, (u, doms))| {
                    let urls: Vec<String> = doms.iter().map(|d| format!("https://d{d}.org/p{i}")).collect();
                    let urls: Vec<&str> = urls.iter().map(String::as_str).collect();
                    rt(&i.to_string(), &format!("user{u}"), &urls)
                })
                .collect()
        })
    }

    proptest! {
        #[test]
        fn structural_invariants(recs in corpus(), seed in any::<u64>()) {
            let map = UrlExpansionMap::new();
            let Ok(g) = build_domain_cooccurrence(&recs, &map, BuildOptions::default()) else {
                return Ok(());
            };
            let total: usize = (0..g.node_count() as NodeId).map(|v| g.degree(v)).sum();
            prop_assert_eq!(total, 2 * g.edge_count());
            let distinct: BTreeSet<String> = recs.iter().flat_map(|r| r.urls.iter())
                .filter_map(|u| extract_domain(u, &map)).map(|d| d.into_string()).collect();
            prop_assert_eq!(g.node_count(), distinct.len());
            for (user, items) in g.user_items().unwrap().iter() {
                for &i in items {
                    let name = g.name(i);
                    prop_assert!(recs.iter().any(|r| r.user_id == user
                        && r.urls.iter().any(|u| extract_domain(u, &map).is_some_and(|d| d.as_str() == name))));
                }
            }
            // order independence
            let mut shuffled = recs.clone();
            let n = shuffled.len();
            for i in 0..n {
                shuffled.swap(i, (seed as usize).wrapping_mul(i + 7) % n);
            }
            let g2 = build_domain_cooccurrence(&shuffled, &map, BuildOptions::default()).unwrap();
            prop_assert_eq!(g, g2);
        }
    }
}
