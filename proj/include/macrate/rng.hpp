// Copyright 2026 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MACRATE_RNG_HPP
#define MACRATE_RNG_HPP

#include <cstdint>
#include <vector>

namespace macrate {

// Counter-based seed splitting: derive_seed(base, c) is the c-th independent
// stream of `base`. Adding streams never perturbs existing ones.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t counter);

// Small deterministic generator (splitmix64). Portable across platforms and
// standard library versions, which keeps every seeded experiment bitwise
// reproducible.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64();

  // Uniform on [0, 1).
  double uniform();
  double uniform(double lo, double hi);
  // Uniform integer on [0, n).
  int uniform_int(int n);

  // Index drawn from a discrete distribution (probabilities sum to ~1).
  int categorical(const std::vector<double>& probs);

  // Poisson variate by inverse-CDF scan; fine for the small means used here.
  int poisson(double mean);

 private:
  std::uint64_t state_;
};

}  // namespace macrate

#endif  // MACRATE_RNG_HPP
