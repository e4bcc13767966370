#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "tplab/grid.hpp"

namespace tplab {

using SpaceTimeFn = std::function<double(const Point&)>;
using Params = std::map<std::string, double>;

struct CatalogEntry {
  std::string id;
  std::string role;  // "expr" for phi/f/g data, "psi" for interface families
  std::string doc;
};

/// Built-in expression ids and interface families in a fixed order.
const std::vector<CatalogEntry>& catalog_entries();

/// Space-time expression by id. `seed` feeds the randomized ids.
/// Throws std::invalid_argument on an unknown id.
SpaceTimeFn make_expr(const std::string& id, const Params& params, int n, std::uint64_t seed = 0);

/// Seeded smooth function sum_j c_j cos(k_j . x + w_j t + theta_j) with
/// sum |c_j| = amp, plus `offset`.
SpaceTimeFn random_smooth(int n, std::uint64_t seed, std::uint64_t stream, double amp,
                          int modes = 4, double offset = 0.0, double kmax = 2.0);

}  // namespace tplab
