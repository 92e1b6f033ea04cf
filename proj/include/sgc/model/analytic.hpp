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


#pragma once

#include <cstdint>
#include <vector>

namespace sgc::model {

// Two-tier (log + sets) cache parameters. Page counts are in pages of w bytes.
struct HierParams {
  double w = 4096;      // set (page) size, bytes
  double s = 246;       // mean object size, bytes
  double n_log = 0;     // log-tier pages
  double n_set = 0;     // set-tier pages, before over-provisioning
  double x = 0.05;      // over-provisioned share of the set tier
  double p = 0;         // share of set rewrites caused by passive migration

  void validate() const;  // throws BadParams
};

// (1 - X) * N_set
double usable_sets(const HierParams& h);
// 2 w N_log / (s N'_set)
double expected_list_len(const HierParams& h);
// (1 - X) N_set / (2 N_log)
double l2swa_p(const HierParams& h);
// (2 - p) L2SWA(P)
double l2swa_total(const HierParams& h);
double l2swa_total(double p, double l2swa_passive);
// 1 / E(FR) + L2SWA
double wa_two_tier(double expected_fill, double l2swa);
// 1 / E(FR_SG)
double wa_set_group(double expected_sg_fill);

// -ln(x) / ln(2)^2
double bf_bits_per_object(double x);

struct PbfgCostParams {
  double n = 350;    // SGs in the pool
  double s = 246;    // mean object size, bytes
  double o = 14.4;   // filter bits per object
  double x = 0.001;  // false-positive rate

  void validate() const;  // throws BadParams
};

// Expected flash reads per lookup of a present key: N o / (8 s) + 1 + (N - 1) x.
// Filters per page n = 8 s / o once s is expressed in bits.
double pbfg_cost(const PbfgCostParams& p);
// Same for an absent key: no true hit, N possible false candidates.
double pbfg_cost_absent(const PbfgCostParams& p);

// Page-granular form: ceil(N / F) + 1 + (N - 1) x, F = filters per page.
double pbfg_cost_paged(double n_sgs, std::uint32_t filters_per_page, double x);
// Filters of a set sized for `objects_per_set` at rate x that fit one page.
std::uint32_t filters_per_page(double x, std::uint32_t objects_per_set, std::uint32_t page_size);

struct BfChoice {
  double x = 0;
  double o = 0;
  double cost = 0;
};

// Log-uniform grid, `points` values from lo to hi inclusive.
std::vector<double> log_grid(double lo = 1e-5, double hi = 1e-1, int points = 41);

// Minimizes pbfg_cost over the grid with o = bf_bits_per_object(x) by
// discrete ternary search (the cost is unimodal in log x). Ties go to the
// larger x. Throws BadParams on an empty grid.
BfChoice optimal_bf_config(double n_sgs, double s, const std::vector<double>& x_grid);

}  // namespace sgc::model
