#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace pooltest {

// One record of a pooled testing design: pool_count pools were formed, each
// containing pool_size units, and positives of those pools tested positive.
// covariates is either empty (no regression structure) or a fixed-length
// numeric vector shared across the dataset, with the intercept as its first
// entry when the dataset was assembled for a regression fit.
struct PoolRow {
  int pool_size = 0;
  long pool_count = 0;
  long positives = 0;
  std::vector<double> covariates;
};

class PooledDataset {
 public:
  PooledDataset() = default;
  explicit PooledDataset(std::vector<PoolRow> rows,
                         std::vector<std::string> covariate_names = {});

  const std::vector<PoolRow>& rows() const { return rows_; }
  std::size_t size() const { return rows_.size(); }
  bool empty() const { return rows_.empty(); }

  bool has_covariates() const { return covariate_dim_ > 0; }
  std::size_t covariate_dim() const { return covariate_dim_; }
  const std::vector<std::string>& covariate_names() const {
    return covariate_names_;
  }

  long total_pools() const;
  long total_units() const;
  long total_positives() const;
  int distinct_pool_sizes() const;

  // Stable content hash used to confirm two fits were run on the same data.
  std::uint64_t fingerprint() const;

 private:
  std::vector<PoolRow> rows_;
  std::vector<std::string> covariate_names_;
  std::size_t covariate_dim_ = 0;
};

// Collapses rows that share the same (pool_size, covariates) key by summing
// pool counts and positives.  The collapsed data carry the same information
// about the parameters as the original rows.
PooledDataset aggregate(const PooledDataset& data);

}  // namespace pooltest
