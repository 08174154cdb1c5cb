//! MovieLens ratings: `user<TAB>item<TAB>rating<TAB>timestamp` (the 100K
//! `u.data` layout) or `user::item::rating::timestamp` (the 1M/10M layout).

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use rand::seq::SliceRandom;

use crate::data::synthetic::substream;
use crate::error::{Error, Result};
use crate::solvers::CompletionProblem;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rating {
    pub user: u64,
    pub item: u64,
    pub rating: f64,
}

/// Parsed ratings with duplicate `(user, item)` pairs collapsed (last wins).
#[derive(Debug, Clone, PartialEq)]
pub struct Ratings {
    pub ratings: Vec<Rating>,
    pub duplicates: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MovieLensSplit {
    pub train: CompletionProblem,
    pub test_omega: Vec<(usize, usize)>,
    pub test_values: Vec<f64>,
    /// Original ids in dense-index order.
    pub user_ids: Vec<u64>,
    pub item_ids: Vec<u64>,
    pub duplicates: usize,
}

fn parse_line(line: &str, lineno: usize) -> Result<Rating> {
    let fields: Vec<&str> = if line.contains("::") {
        line.split("::").collect()
    } else {
        line.split(['\t', ' ', ',']).filter(|f| !f.is_empty()).collect()
    };
    if fields.len() < 3 {
        return Err(Error::data(
            Some(lineno),
            format!("expected user, item, rating[, timestamp]; got `{line}`"),
        ));
    }
    let id = |s: &str, what: &str| -> Result<u64> {
        s.trim()
            .parse()
            .map_err(|_| Error::data(Some(lineno), format!("bad {what} id `{s}`")))
    };
    let user = id(fields[0], "user")?;
    let item = id(fields[1], "item")?;
    let rating: f64 = fields[2]
        .trim()
        .parse()
        .map_err(|_| Error::data(Some(lineno), format!("bad rating `{}`", fields[2])))?;
    if !rating.is_finite() {
        return Err(Error::data(Some(lineno), "rating is not finite"));
    }
    Ok(Rating { user, item, rating })
}

pub fn parse_ratings<R: BufRead>(reader: R) -> Result<Ratings> {
    let mut by_pair: BTreeMap<(u64, u64), usize> = BTreeMap::new();
    let mut ratings: Vec<Rating> = Vec::new();
    let mut duplicates = 0;
    for (k, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let r = parse_line(&line, k + 1)?;
        match by_pair.get(&(r.user, r.item)) {
            Some(&slot) => {
                duplicates += 1;
                ratings[slot] = r;
            }
            None => {
                by_pair.insert((r.user, r.item), ratings.len());
                ratings.push(r);
            }
        }
    }
    if ratings.is_empty() {
        return Err(Error::data(None, "no ratings found"));
    }
    Ok(Ratings {
        ratings,
        duplicates,
    })
}

/// Maps ids to dense 0-based indices (sorted by id) and holds out a seeded
/// uniform fraction of ratings for evaluation.
pub fn split_ratings(ratings: &Ratings, holdout_fraction: f64, seed: u64) -> Result<MovieLensSplit> {
    if !(0.0..1.0).contains(&holdout_fraction) {
        return Err(Error::param(format!(
            "holdout_fraction must lie in [0, 1), got {holdout_fraction}"
        )));
    }
    let mut user_ids: Vec<u64> = ratings.ratings.iter().map(|r| r.user).collect();
    let mut item_ids: Vec<u64> = ratings.ratings.iter().map(|r| r.item).collect();
    user_ids.sort_unstable();
    user_ids.dedup();
    item_ids.sort_unstable();
    item_ids.dedup();
    let dense = |ids: &[u64], id: u64| ids.binary_search(&id).expect("id collected above");

    let total = ratings.ratings.len();
    let n_test = (holdout_fraction * total as f64).round() as usize;
    if n_test >= total {
        return Err(Error::param("holdout leaves no training ratings"));
    }
    let mut order: Vec<usize> = (0..total).collect();
    order.shuffle(&mut substream(seed, 0x6d6c));
    let mut is_test = vec![false; total];
    for &k in &order[..n_test] {
        is_test[k] = true;
    }

    let mut omega = Vec::with_capacity(total - n_test);
    let mut observed = Vec::with_capacity(total - n_test);
    let mut test_omega = Vec::with_capacity(n_test);
    let mut test_values = Vec::with_capacity(n_test);
    for (k, r) in ratings.ratings.iter().enumerate() {
        let idx = (dense(&user_ids, r.user), dense(&item_ids, r.item));
        if is_test[k] {
            test_omega.push(idx);
            test_values.push(r.rating);
        } else {
            omega.push(idx);
            observed.push(r.rating);
        }
    }
    let train = CompletionProblem::new((user_ids.len(), item_ids.len()), omega, observed)?;
    Ok(MovieLensSplit {
        train,
        test_omega,
        test_values,
        user_ids,
        item_ids,
        duplicates: ratings.duplicates,
    })
}

pub fn load_movielens(path: impl AsRef<Path>, holdout_fraction: f64, seed: u64) -> Result<MovieLensSplit> {
    let file = File::open(path.as_ref())
        .map_err(|e| Error::Io(format!("{}: {e}", path.as_ref().display())))?;
    let ratings = parse_ratings(BufReader::new(file))?;
    split_ratings(&ratings, holdout_fraction, seed)
}
