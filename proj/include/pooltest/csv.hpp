#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pooltest/dataset.hpp"
#include "pooltest/diagnostics.hpp"

namespace pooltest {

// Which CSV columns play which role in the analysis.  Covariate columns are
// taken in the listed order; a column whose cells all parse as numbers is
// used as-is, anything else is treated as categorical and expanded into
// indicator columns against its lexicographically first level.
struct ModelSpec {
  std::string response;    // positive-pool counts
  std::string pools;       // pools per record
  std::string pool_size;   // units per pool
  std::vector<std::string> covariates;
  bool fixed_intensity = false;  // hold the excess intensity at zero
  double level = 0.95;
};

struct LoadedData {
  PooledDataset data;            // intercept-first covariates, named
  std::vector<TermGroup> groups; // one group per requested covariate column
};

// Reads a CSV file with a header row into a dataset per the given roles.
// Cell and consistency errors cite the 1-based data row (header excluded).
LoadedData load_csv(const std::string& path, const ModelSpec& spec);

// Same parsing applied to in-memory text; load_csv delegates here.
LoadedData load_csv_text(const std::string& text, const ModelSpec& spec);

// Writes columns positive,pools,poolsize plus any covariate columns past
// the intercept.  Reloading the output reproduces the dataset exactly.
std::string dataset_to_csv(const PooledDataset& data);

}  // namespace pooltest
