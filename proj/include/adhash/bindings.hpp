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

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "adhash/rdf.hpp"

namespace adhash {

/// Rows of TermIds over an ordered list of query variables. Arity zero is
/// allowed (a fully constant query yields zero or one empty row).
class BindingTable {
public:
    BindingTable() = default;
    explicit BindingTable(std::vector<std::uint32_t> columns) : columns_(std::move(columns)) {}

    const std::vector<std::uint32_t> &columns() const noexcept { return columns_; }
    std::size_t arity() const noexcept { return columns_.size(); }
    std::size_t size() const noexcept { return rows_; }
    bool empty() const noexcept { return rows_ == 0; }

    std::optional<std::size_t> column_of(std::uint32_t var) const;

    std::span<const TermId> row(std::size_t i) const {
        return {cells_.data() + i * arity(), arity()};
    }
    void add_row(std::span<const TermId> values);
    /// Appends rows of a table with identical columns.
    void append(const BindingTable &other);

    /// Sorts rows and drops duplicates.
    void deduplicate();
    /// Keeps `vars` in the given order, then deduplicates.
    BindingTable project(const std::vector<std::uint32_t> &vars) const;

    /// Distinct values of one column in ascending order.
    std::vector<TermId> distinct(std::size_t column) const;

    std::vector<std::vector<TermId>> sorted_rows() const;

    const std::vector<TermId> &cells() const noexcept { return cells_; }
    static BindingTable from_cells(std::vector<std::uint32_t> columns, std::vector<TermId> cells, std::size_t rows);

private:
    std::vector<std::uint32_t> columns_;
    std::vector<TermId> cells_;
    std::size_t rows_ = 0;
};

} // namespace adhash
