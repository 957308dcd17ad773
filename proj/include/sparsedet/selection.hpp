// Copyright 2026 The sparsedet Authors
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

#ifndef SPARSEDET_SELECTION_HPP_
#define SPARSEDET_SELECTION_HPP_

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "sparsedet/errors.hpp"

namespace sparsedet {

// An ordered subset of the ground set {0, ..., ground_size-1}.  Order is the
// insertion order (greedy chains depend on it); set-level comparisons ignore
// it.  Indices are validated to be distinct and in range.
class Selection {
 public:
  Selection(std::vector<int> indices, int ground_size)
      : indices_(std::move(indices)),
        member_(static_cast<std::size_t>(require_ground(ground_size)), false),
        ground_size_(ground_size) {
    for (int i : indices_) {
      if (i < 0 || i >= ground_size_)
        throw DimensionError("Selection: index " + std::to_string(i) +
                             " out of range for ground size " +
                             std::to_string(ground_size_));
      if (member_[static_cast<std::size_t>(i)])
        throw ParameterError("Selection: duplicate index " +
                             std::to_string(i));
      member_[static_cast<std::size_t>(i)] = true;
    }
  }

  static Selection empty(int ground_size) { return Selection({}, ground_size); }

  static Selection full(int ground_size) {
    std::vector<int> all(static_cast<std::size_t>(require_ground(ground_size)));
    for (int i = 0; i < ground_size; ++i) all[static_cast<std::size_t>(i)] = i;
    return Selection(std::move(all), ground_size);
  }

  // Builds a selection from a bit mask, indices in increasing order.
  static Selection from_mask(std::uint64_t mask, int ground_size) {
    std::vector<int> idx;
    for (int i = 0; i < ground_size; ++i)
      if (mask & (std::uint64_t{1} << i)) idx.push_back(i);
    return Selection(std::move(idx), ground_size);
  }

  int ground_size() const { return ground_size_; }
  int size() const { return static_cast<int>(indices_.size()); }
  bool is_empty() const { return indices_.empty(); }
  const std::vector<int>& indices() const { return indices_; }

  bool contains(int i) const {
    return i >= 0 && i < ground_size_ && member_[static_cast<std::size_t>(i)];
  }

  // Appends an element (validated).
  void append(int i) {
    if (i < 0 || i >= ground_size_)
      throw DimensionError("Selection: index " + std::to_string(i) +
                           " out of range");
    if (member_[static_cast<std::size_t>(i)])
      throw ParameterError("Selection: duplicate index " + std::to_string(i));
    member_[static_cast<std::size_t>(i)] = true;
    indices_.push_back(i);
  }

  // Copy with one more element.
  Selection with(int i) const {
    Selection out = *this;
    out.append(i);
    return out;
  }

  std::vector<int> sorted() const {
    std::vector<int> s = indices_;
    std::sort(s.begin(), s.end());
    return s;
  }

  bool set_equals(const Selection& other) const {
    return ground_size_ == other.ground_size_ && sorted() == other.sorted();
  }

  // Bit mask (requires ground_size <= 64).
  std::uint64_t mask() const {
    if (ground_size_ > 64)
      throw ParameterError("Selection::mask: ground set larger than 64");
    std::uint64_t m = 0;
    for (int i : indices_) m |= std::uint64_t{1} << i;
    return m;
  }

 private:
  static int require_ground(int ground_size) {
    if (ground_size < 0)
      throw DimensionError("Selection: negative ground size");
    return ground_size;
  }

  std::vector<int> indices_;
  std::vector<bool> member_;
  int ground_size_;
};

}  // namespace sparsedet

#endif  // SPARSEDET_SELECTION_HPP_
