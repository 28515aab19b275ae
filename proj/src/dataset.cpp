#include "pooltest/dataset.hpp"

#include <cstring>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace pooltest {

PooledDataset::PooledDataset(std::vector<PoolRow> rows,
                             std::vector<std::string> covariate_names)
    : rows_(std::move(rows)), covariate_names_(std::move(covariate_names)) {
  if (rows_.empty()) {
    throw std::invalid_argument("PooledDataset: no rows");
  }
  covariate_dim_ = rows_.front().covariates.size();
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    const PoolRow& r = rows_[i];
    std::ostringstream where;
    where << "PooledDataset row " << i << ": ";
    if (r.pool_size < 1) {
      throw std::invalid_argument(where.str() + "pool_size must be >= 1");
    }
    if (r.pool_count < 1) {
      throw std::invalid_argument(where.str() + "pool_count must be >= 1");
    }
    if (r.positives < 0 || r.positives > r.pool_count) {
      throw std::invalid_argument(where.str() +
                                  "positives must lie in [0, pool_count]");
    }
    if (r.covariates.size() != covariate_dim_) {
      throw std::invalid_argument(where.str() +
                                  "covariate length differs between rows");
    }
  }
  if (!covariate_names_.empty() && covariate_names_.size() != covariate_dim_) {
    throw std::invalid_argument(
        "PooledDataset: covariate_names length does not match covariate "
        "vectors");
  }
}

long PooledDataset::total_pools() const {
  long n = 0;
  for (const PoolRow& r : rows_) n += r.pool_count;
  return n;
}

long PooledDataset::total_units() const {
  long n = 0;
  for (const PoolRow& r : rows_) n += r.pool_count * r.pool_size;
  return n;
}

long PooledDataset::total_positives() const {
  long n = 0;
  for (const PoolRow& r : rows_) n += r.positives;
  return n;
}

int PooledDataset::distinct_pool_sizes() const {
  std::set<int> sizes;
  for (const PoolRow& r : rows_) sizes.insert(r.pool_size);
  return static_cast<int>(sizes.size());
}

std::uint64_t PooledDataset::fingerprint() const {
  // FNV-1a over the aggregated cells so that row order and duplicate keys do
  // not change the hash.
  PooledDataset agg = aggregate(*this);
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](const void* p, std::size_t len) {
    const unsigned char* b = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < len; ++i) {
      h ^= b[i];
      h *= 1099511628211ULL;
    }
  };
  for (const PoolRow& r : agg.rows()) {
    mix(&r.pool_size, sizeof(r.pool_size));
    mix(&r.pool_count, sizeof(r.pool_count));
    mix(&r.positives, sizeof(r.positives));
    for (double c : r.covariates) mix(&c, sizeof(c));
  }
  return h;
}

PooledDataset aggregate(const PooledDataset& data) {
  std::map<std::pair<int, std::vector<double>>, PoolRow> cells;
  for (const PoolRow& r : data.rows()) {
    auto key = std::make_pair(r.pool_size, r.covariates);
    auto it = cells.find(key);
    if (it == cells.end()) {
      cells.emplace(std::move(key), r);
    } else {
      it->second.pool_count += r.pool_count;
      it->second.positives += r.positives;
    }
  }
  std::vector<PoolRow> rows;
  rows.reserve(cells.size());
  for (auto& kv : cells) rows.push_back(std::move(kv.second));
  return PooledDataset(std::move(rows), data.covariate_names());
}

}  // namespace pooltest
