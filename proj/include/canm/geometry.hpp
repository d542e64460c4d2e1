#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "canm/linalg.hpp"

namespace canm {

/// Sorted, duplicate-free subset of {0, ..., N-1} that remembers its ambient N.
///
/// Used for observation sets, compression sets, sensor arrays and their
/// difference co-arrays.
class IndexSet {
public:
    using value_type = std::uint32_t;
    using const_iterator = std::vector<value_type>::const_iterator;

    IndexSet() = default;

    /// Requires strictly increasing indices below `ambient`; throws DomainError otherwise.
    IndexSet(std::vector<value_type> indices, std::size_t ambient);

    /// Sorts and deduplicates before validating.
    static IndexSet from_unsorted(std::vector<value_type> indices, std::size_t ambient);
    static IndexSet full(std::size_t ambient);
    /// {first, ..., last} inside an ambient of size `ambient`.
    static IndexSet range(value_type first, value_type last, std::size_t ambient);

    std::size_t size() const { return indices_.size(); }
    bool empty() const { return indices_.empty(); }
    std::size_t ambient() const { return ambient_; }
    value_type operator[](std::size_t k) const { return indices_[k]; }
    value_type max() const;
    const std::vector<value_type>& indices() const { return indices_; }
    const_iterator begin() const { return indices_.begin(); }
    const_iterator end() const { return indices_.end(); }

    bool contains(value_type v) const;
    bool is_subset_of(const IndexSet& other) const;
    bool is_full() const { return indices_.size() == ambient_; }

    /// Elements of {0, ..., N-1} not in this set.
    IndexSet complement() const;
    IndexSet united_with(const IndexSet& other) const;
    /// Elements of this set missing from `other`.
    std::vector<value_type> missing_from(const IndexSet& other) const;

    friend bool operator==(const IndexSet&, const IndexSet&) = default;

private:
    std::vector<value_type> indices_;
    std::size_t ambient_ = 0;
};

/// Nonnegative pairwise differences {i1 - i2 >= 0 : i1, i2 in I}, same ambient as I.
IndexSet difference_set(const IndexSet& set);

/// Fractal Cantor array: C_1 = {0, 1}, C_{k+1} = C_k ∪ (C_k + 2·3^{k-1}).
/// Ambient is 3^{order-1} + 1 and the array has 2^order elements.
/// Throws DomainError for order 0 and CapacityError when the aperture does not
/// fit the index type.
IndexSet cantor_array(unsigned order);

/// True iff the difference co-array of `array` is {0, ..., N-1}.
bool is_complete(const IndexSet& array);

/// The row-selection matrix P_S in C^{|S| x N}.
class SelectionOperator {
public:
    explicit SelectionOperator(IndexSet set) : set_(std::move(set)) {}

    const IndexSet& set() const { return set_; }
    std::size_t rows() const { return set_.size(); }
    std::size_t cols() const { return set_.ambient(); }

    /// P_S x
    ComplexVector apply(const ComplexVector& x) const;
    /// P_S^H y (zero outside S)
    ComplexVector embed(const ComplexVector& y) const;
    /// P_S H P_S^H
    ComplexMatrix compress(const ComplexMatrix& h) const;
    /// P_S^H S P_S
    ComplexMatrix lift(const ComplexMatrix& s) const;
    ComplexMatrix matrix() const;

private:
    IndexSet set_;
};

ComplexVector select(const SelectionOperator& op, const ComplexVector& x);

struct ConditionResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

/// Diagnostic check of the exact-recovery hypotheses for M = P_I.
struct CompressionReport {
    std::vector<ConditionResult> conditions;
    std::vector<IndexSet::value_type> missing_lags; ///< lags of ∂I absent from Ω
    bool all_passed() const;
    /// Names and details of the failing conditions, joined for display.
    std::string failure_summary() const;
};

/// Checks 0 ∈ I, ∂I ⊆ Ω and p < |I|.
CompressionReport validate_compression(const IndexSet& compression, const IndexSet& omega,
                                       std::size_t sources);

} // namespace canm
