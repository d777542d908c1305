//! Planted-partition tweet corpora for experiments and tests.
//!
//! Users belong to one of two communities. Each community owns a block of
//! domains and (optionally) a pool of hashtags, and retweets mostly its own
//! members, a few of whom act as hubs.

use std::io::Write;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{write_tweets, TweetRecord, UrlExpansionMap};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthConfig {
    pub users_per_community: usize,
    pub domains_per_block: usize,
    pub min_url_retweets: usize,
    pub max_url_retweets: usize,
    /// Probability a retweeted URL comes from the user's own block.
    pub in_block: f64,
    /// Zipf exponent of domain popularity within a block; 0 is uniform.
    pub domain_zipf: f64,
    /// Probability a retweet targets the user's own community.
    pub in_community: f64,
    pub hubs_per_community: usize,
    /// Share of in-community retweets that go to a hub.
    pub hub_share: f64,
    /// Expected hashtags per tweet.
    pub hashtag_rate: f64,
    pub hashtags_per_community: usize,
    /// Probability a hashtag comes from the user's own pool.
    pub hashtag_in_community: f64,
    /// URL-less retweets per user of peripheral accounts that belong to
    /// neither community and never retweet themselves.
    pub noise_retweets_per_user: usize,
    pub peripheral_accounts: usize,
    /// Share of URLs that go through a link shortener.
    pub short_link_rate: f64,
    /// Share of shortened links whose expansion failed.
    pub dead_link_rate: f64,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            users_per_community: 300,
            domains_per_block: 25,
            min_url_retweets: 5,
            max_url_retweets: 15,
            in_block: 0.9,
            domain_zipf: 1.0,
            in_community: 0.95,
            hubs_per_community: 5,
            hub_share: 0.5,
            hashtag_rate: 0.0,
            hashtags_per_community: 20,
            hashtag_in_community: 0.75,
            noise_retweets_per_user: 0,
            peripheral_accounts: 300,
            short_link_rate: 0.1,
            dead_link_rate: 0.05,
            seed: 1,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SynthCorpus {
    pub records: Vec<TweetRecord>,
    pub expansion: UrlExpansionMap,
    /// Planted community per user id.
    pub community_of: Vec<(String, u8)>,
}

impl SynthCorpus {
    pub fn write_files(&self, tweets: impl Write, expansion: impl Write) -> Result<()> {
        write_tweets(&self.records, tweets)?;
        self.expansion.write_tsv(expansion)
    }
}

const WORDS: &[&str] = &[
    "breaking", "news", "read", "this", "thread", "truth", "update", "video", "must", "see", "report", "story",
];

fn user_name(community: usize, i: usize) -> String {
    format!("u{community}{i:04}")
}

fn domain_name(block: usize, i: usize) -> String {
    format!("site{i:02}.block{block}.net")
}

fn hashtag_name(community: usize, i: usize) -> String {
    format!("topic{community}x{i:02}")
}

pub fn generate(cfg: &SynthConfig) -> Result<SynthCorpus> {
    let check = |ok: bool, msg: &str| if ok { Ok(()) } else { Err(Error::invalid(msg)) };
    check(cfg.users_per_community >= 2, "users_per_community must be at least 2")?;
    check(cfg.domains_per_block >= 1, "domains_per_block must be at least 1")?;
    check(cfg.min_url_retweets <= cfg.max_url_retweets, "min_url_retweets exceeds max_url_retweets")?;
    check(
        (1..=cfg.users_per_community).contains(&cfg.hubs_per_community),
        "hubs_per_community must be between 1 and users_per_community",
    )?;
    for p in [cfg.in_block, cfg.in_community, cfg.hub_share, cfg.hashtag_in_community, cfg.short_link_rate, cfg.dead_link_rate] {
        check((0.0..=1.0).contains(&p), "probabilities must lie in [0, 1]")?;
    }
    check(cfg.hashtag_rate >= 0.0, "hashtag_rate must be non-negative")?;
    check(cfg.domain_zipf >= 0.0, "domain_zipf must be non-negative")?;
    check(
        cfg.noise_retweets_per_user == 0 || cfg.peripheral_accounts > 0,
        "noise retweets need at least one peripheral account",
    )?;
    let popularity = WeightedIndex::new((1..=cfg.domains_per_block).map(|r| (r as f64).powf(-cfg.domain_zipf)))
        .map_err(|e| Error::invalid(format!("domain popularity: {e}")))?;

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let n = cfg.users_per_community;
    let mut records = Vec::new();
    let mut expansion = UrlExpansionMap::new();
    let mut community_of = Vec::with_capacity(2 * n);
    let mut next_id = 0u64;
    let mut next_short = 0u64;

    for c in 0..2 {
        for i in 0..n {
            community_of.push((user_name(c, i), c as u8));
        }
    }

    let pick_target = |rng: &mut ChaCha8Rng, c: usize, i: usize, noise: bool| -> String {
        if noise {
            return format!("p{:04}", rng.random_range(0..cfg.peripheral_accounts));
        }
        loop {
            let (tc, ti) = if rng.random_bool(cfg.in_community) {
                if rng.random_bool(cfg.hub_share) {
                    (c, rng.random_range(0..cfg.hubs_per_community))
                } else {
                    (c, rng.random_range(0..n))
                }
            } else {
                (1 - c, rng.random_range(0..n))
            };
            if (tc, ti) != (c, i) {
                return user_name(tc, ti);
            }
        }
    };

    for c in 0..2 {
        for i in 0..n {
            let user = user_name(c, i);
            let url_retweets = rng.random_range(cfg.min_url_retweets..=cfg.max_url_retweets);
            for k in 0..url_retweets + cfg.noise_retweets_per_user {
                let noise = k >= url_retweets;
                let target = pick_target(&mut rng, c, i, noise);
                let mut urls = Vec::new();
                if !noise {
                    let block = if rng.random_bool(cfg.in_block) { c } else { 1 - c };
                    let domain = domain_name(block, popularity.sample(&mut rng));
                    let prefix = if rng.random_bool(0.3) { "www." } else { "" };
                    let long = format!("https://{prefix}{domain}/story/{}", rng.random_range(0..100_000));
                    if rng.random_bool(cfg.short_link_rate) {
                        let short = format!("https://sho.rt/{next_short:x}");
                        next_short += 1;
                        if rng.random_bool(cfg.dead_link_rate) {
                            expansion.insert_miss(&short)?;
                        } else {
                            expansion.insert(&short, &long)?;
                        }
                        urls.push(short);
                    } else {
                        urls.push(long);
                    }
                }
                let mut hashtags = Vec::new();
                let mut budget = cfg.hashtag_rate;
                while budget > 0.0 && rng.random_bool(budget.min(1.0)) {
                    let pool = if rng.random_bool(cfg.hashtag_in_community) { c } else { 1 - c };
                    hashtags.push(hashtag_name(pool, rng.random_range(0..cfg.hashtags_per_community)));
                    budget -= 1.0;
                }
                let words: Vec<&str> = (0..5).map(|_| *WORDS.choose(&mut rng).unwrap()).collect();
                let mut text = format!("RT @{target}: {}", words.join(" "));
                for h in &hashtags {
                    text.push_str(&format!(" #{h}"));
                }
                for u in &urls {
                    text.push(' ');
                    text.push_str(u);
                }
                records.push(TweetRecord {
                    tweet_id: format!("t{next_id}"),
                    user_id: user.clone(),
                    text,
                    hashtags,
                    retweeted_user_id: Some(target),
                    urls,
                });
                next_id += 1;
            }
        }
    }
    Ok(SynthCorpus {
        records,
        expansion,
        community_of,
    })
}
