/*
 * Copyright 2026 The AdHash Authors.
 *     All rights reserved.
 *
 *  Licensed under the Apache License, Version 2.0 (the "License");
 *  you may not use this file except in compliance with the License.
 *  You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 *  Unless required by applicable law or agreed to in writing,
 *  software distributed under the License is distributed on an "AS
 *  IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either
 *  express or implied.  See the License for the specific language
 *  governing permissions and limitations under the License.
 *
 */

#include "adhash/bindings.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace adhash {

std::optional<std::size_t> BindingTable::column_of(std::uint32_t var) const {
    auto it = std::find(columns_.begin(), columns_.end(), var);
    if (it == columns_.end())
        return std::nullopt;
    return static_cast<std::size_t>(it - columns_.begin());
}

void BindingTable::add_row(std::span<const TermId> values) {
    if (values.size() != arity())
        throw std::invalid_argument("row arity mismatch");
    cells_.insert(cells_.end(), values.begin(), values.end());
    ++rows_;
}

void BindingTable::append(const BindingTable &other) {
    if (other.columns_ != columns_)
        throw std::invalid_argument("column mismatch");
    cells_.insert(cells_.end(), other.cells_.begin(), other.cells_.end());
    rows_ += other.rows_;
}

void BindingTable::deduplicate() {
    if (arity() == 0) {
        rows_ = std::min<std::size_t>(rows_, 1);
        return;
    }
    const std::size_t a = arity();
    std::vector<std::size_t> order(rows_);
    std::iota(order.begin(), order.end(), 0);
    auto less = [&](std::size_t x, std::size_t y) {
        return std::lexicographical_compare(cells_.begin() + x * a, cells_.begin() + (x + 1) * a,
                                            cells_.begin() + y * a, cells_.begin() + (y + 1) * a);
    };
    std::sort(order.begin(), order.end(), less);
    std::vector<TermId> out;
    out.reserve(cells_.size());
    std::size_t kept = 0;
    for (std::size_t i = 0; i < order.size(); ++i) {
        if (i > 0 && !less(order[i - 1], order[i]))
            continue;
        out.insert(out.end(), cells_.begin() + order[i] * a, cells_.begin() + (order[i] + 1) * a);
        ++kept;
    }
    cells_ = std::move(out);
    rows_ = kept;
}

BindingTable BindingTable::project(const std::vector<std::uint32_t> &vars) const {
    std::vector<std::size_t> idx;
    for (auto v : vars) {
        auto c = column_of(v);
        if (!c)
            throw std::invalid_argument("projection of an unbound variable");
        idx.push_back(*c);
    }
    BindingTable out(vars);
    out.cells_.reserve(rows_ * vars.size());
    for (std::size_t r = 0; r < rows_; ++r)
        for (auto c : idx)
            out.cells_.push_back(cells_[r * arity() + c]);
    out.rows_ = rows_;
    out.deduplicate();
    return out;
}

std::vector<TermId> BindingTable::distinct(std::size_t column) const {
    std::vector<TermId> out;
    out.reserve(rows_);
    for (std::size_t r = 0; r < rows_; ++r)
        out.push_back(cells_[r * arity() + column]);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<std::vector<TermId>> BindingTable::sorted_rows() const {
    std::vector<std::vector<TermId>> out;
    out.reserve(rows_);
    for (std::size_t r = 0; r < rows_; ++r)
        out.emplace_back(row(r).begin(), row(r).end());
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

BindingTable BindingTable::from_cells(std::vector<std::uint32_t> columns, std::vector<TermId> cells,
                                      std::size_t rows) {
    BindingTable t(std::move(columns));
    if (cells.size() != rows * t.arity())
        throw std::invalid_argument("cell count does not match rows");
    t.cells_ = std::move(cells);
    t.rows_ = rows;
    return t;
}

} // namespace adhash
