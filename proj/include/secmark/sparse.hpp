// Copyright 2026 Secmark Authors
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

#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "secmark/errors.hpp"

namespace secmark {

// Sparse feature vector: sorted (index, value) pairs, one entry per index.
class SparseVec {
 public:
  void set(int index, double value) {
    auto it = std::lower_bound(
        entries_.begin(), entries_.end(), index,
        [](const auto& e, int i) { return e.first < i; });
    if (it != entries_.end() && it->first == index)
      it->second = value;
    else
      entries_.insert(it, {index, value});
  }

  void add(int index, double value) {
    auto it = std::lower_bound(
        entries_.begin(), entries_.end(), index,
        [](const auto& e, int i) { return e.first < i; });
    if (it != entries_.end() && it->first == index)
      it->second += value;
    else
      entries_.insert(it, {index, value});
  }

  double get(int index) const {
    auto it = std::lower_bound(
        entries_.begin(), entries_.end(), index,
        [](const auto& e, int i) { return e.first < i; });
    return (it != entries_.end() && it->first == index) ? it->second : 0.0;
  }

  double dot_dense(const double* w) const {
    double s = 0.0;
    for (const auto& [i, v] : entries_) s += w[i] * v;
    return s;
  }

  const std::vector<std::pair<int, double>>& entries() const {
    return entries_;
  }
  size_t nnz() const { return entries_.size(); }

  // Drops indices not present in keep[], remapping via keep's value.
  SparseVec project(const std::unordered_map<int, int>& keep) const {
    SparseVec out;
    for (const auto& [i, v] : entries_) {
      auto it = keep.find(i);
      if (it != keep.end()) out.set(it->second, v);
    }
    return out;
  }

  bool operator==(const SparseVec&) const = default;

 private:
  std::vector<std::pair<int, double>> entries_;
};

// Bidirectional feature-name <-> index map. Indices are assigned in
// registration order and never reused.
class FeatureSpace {
 public:
  int intern(const std::string& name) {
    auto it = index_.find(name);
    if (it != index_.end()) return it->second;
    int id = static_cast<int>(names_.size());
    names_.push_back(name);
    index_.emplace(name, id);
    return id;
  }

  // -1 when the name was never registered.
  int lookup(const std::string& name) const {
    auto it = index_.find(name);
    return it == index_.end() ? -1 : it->second;
  }

  const std::string& name(int id) const {
    if (id < 0 || id >= static_cast<int>(names_.size()))
      throw DataError("feature index " + std::to_string(id) +
                      " out of range (size " + std::to_string(names_.size()) +
                      ")");
    return names_[id];
  }

  int size() const { return static_cast<int>(names_.size()); }
  const std::vector<std::string>& names() const { return names_; }

  bool operator==(const FeatureSpace& o) const { return names_ == o.names_; }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, int> index_;
};

}  // namespace secmark
