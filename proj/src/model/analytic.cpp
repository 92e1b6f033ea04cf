// Copyright 2026 The sgcache Authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy of
// the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
// License for the specific language governing permissions and limitations under
// the License.


#include "sgc/model/analytic.hpp"

#include <algorithm>
#include <cmath>

#include "sgc/core/error.hpp"
#include "sgc/index/bloom.hpp"

namespace sgc::model {

void HierParams::validate() const {
  if (!(w > 0 && s > 0 && n_log > 0 && n_set > 0)) {
    throw BadParams("w, s, N_log and N_set must be positive");
  }
  if (!(x >= 0 && x < 1)) throw BadParams("X must lie in [0, 1)");
  if (!(p >= 0 && p <= 1)) throw BadParams("p must lie in [0, 1]");
}

double usable_sets(const HierParams& h) {
  h.validate();
  return (1 - h.x) * h.n_set;
}

double expected_list_len(const HierParams& h) {
  return 2 * h.w * h.n_log / (h.s * usable_sets(h));
}

double l2swa_p(const HierParams& h) { return usable_sets(h) / (2 * h.n_log); }

double l2swa_total(double p, double l2swa_passive) {
  if (!(p >= 0 && p <= 1)) throw BadParams("p must lie in [0, 1]");
  if (!(l2swa_passive > 0)) throw BadParams("L2SWA(P) must be positive");
  return (2 - p) * l2swa_passive;
}

double l2swa_total(const HierParams& h) { return l2swa_total(h.p, l2swa_p(h)); }

double wa_two_tier(double expected_fill, double l2swa) {
  if (!(expected_fill > 0 && expected_fill <= 1)) throw BadParams("fill rate must lie in (0, 1]");
  if (!(l2swa >= 0)) throw BadParams("L2SWA must be non-negative");
  return 1 / expected_fill + l2swa;
}

double wa_set_group(double expected_sg_fill) {
  if (!(expected_sg_fill > 0 && expected_sg_fill <= 1)) {
    throw BadParams("fill rate must lie in (0, 1]");
  }
  return 1 / expected_sg_fill;
}

double bf_bits_per_object(double x) { return index::bf_bits_per_object(x); }

void PbfgCostParams::validate() const {
  if (!(n >= 1 && s > 0 && o > 0)) throw BadParams("N >= 1, s > 0 and o > 0 required");
  if (!(x > 0 && x < 1)) throw BadParams("x must lie in (0, 1)");
}

double pbfg_cost(const PbfgCostParams& p) {
  p.validate();
  return p.n * p.o / (8 * p.s) + 1 + (p.n - 1) * p.x;
}

double pbfg_cost_absent(const PbfgCostParams& p) {
  p.validate();
  return p.n * p.o / (8 * p.s) + p.n * p.x;
}

double pbfg_cost_paged(double n_sgs, std::uint32_t per_page, double x) {
  if (!(n_sgs >= 1) || per_page == 0) throw BadParams("N >= 1 and filters per page > 0 required");
  if (!(x > 0 && x < 1)) throw BadParams("x must lie in (0, 1)");
  return std::ceil(n_sgs / per_page) + 1 + (n_sgs - 1) * x;
}

std::uint32_t filters_per_page(double x, std::uint32_t objects_per_set, std::uint32_t page_size) {
  return page_size / index::filter_shape(x, objects_per_set).bytes();
}

std::vector<double> log_grid(double lo, double hi, int points) {
  if (!(lo > 0 && hi >= lo) || points < 1) throw BadParams("grid needs 0 < lo <= hi and points >= 1");
  std::vector<double> g;
  g.reserve(points);
  if (points == 1) return {lo};
  const double a = std::log(lo), b = std::log(hi);
  for (int i = 0; i < points; ++i) g.push_back(std::exp(a + (b - a) * i / (points - 1)));
  return g;
}

BfChoice optimal_bf_config(double n_sgs, double s, const std::vector<double>& x_grid) {
  if (x_grid.empty()) throw BadParams("empty x grid");
  std::vector<double> xs = x_grid;
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  auto cost = [&](std::size_t i) {
    return pbfg_cost(PbfgCostParams{n_sgs, s, bf_bits_per_object(xs[i]), xs[i]});
  };
  // Invariant: the minimum lies in [lo, hi]. On equal costs keep the larger x.
  std::size_t lo = 0, hi = xs.size() - 1;
  while (hi - lo > 2) {
    const std::size_t m1 = lo + (hi - lo) / 3;
    const std::size_t m2 = hi - (hi - lo) / 3;
    if (cost(m1) < cost(m2)) {
      hi = m2 - 1;
    } else {
      lo = m1 + 1;
    }
  }
  std::size_t best = lo;
  for (std::size_t i = lo + 1; i <= hi; ++i) {
    if (cost(i) <= cost(best)) best = i;
  }
  return BfChoice{xs[best], bf_bits_per_object(xs[best]), cost(best)};
}

}  // namespace sgc::model
