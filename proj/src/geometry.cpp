#include "canm/geometry.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

#include "canm/error.hpp"

namespace canm {

IndexSet::IndexSet(std::vector<value_type> indices, std::size_t ambient)
    : indices_(std::move(indices)), ambient_(ambient)
{
    for (std::size_t k = 0; k < indices_.size(); ++k) {
        if (indices_[k] >= ambient_) {
            throw DomainError("IndexSet: index " + std::to_string(indices_[k]) +
                              " outside ambient " + std::to_string(ambient_));
        }
        if (k > 0 && indices_[k] <= indices_[k - 1]) {
            throw DomainError("IndexSet: indices must be strictly increasing");
        }
    }
}

IndexSet IndexSet::from_unsorted(std::vector<value_type> indices, std::size_t ambient)
{
    std::sort(indices.begin(), indices.end());
    indices.erase(std::unique(indices.begin(), indices.end()), indices.end());
    return IndexSet(std::move(indices), ambient);
}

IndexSet IndexSet::full(std::size_t ambient)
{
    if (ambient > std::numeric_limits<value_type>::max()) throw CapacityError("IndexSet: ambient too large");
    std::vector<value_type> v(ambient);
    for (std::size_t k = 0; k < ambient; ++k) v[k] = static_cast<value_type>(k);
    return IndexSet(std::move(v), ambient);
}

IndexSet IndexSet::range(value_type first, value_type last, std::size_t ambient)
{
    std::vector<value_type> v;
    for (value_type k = first; k <= last; ++k) v.push_back(k);
    return IndexSet(std::move(v), ambient);
}

IndexSet::value_type IndexSet::max() const
{
    if (indices_.empty()) throw DomainError("IndexSet::max on empty set");
    return indices_.back();
}

bool IndexSet::contains(value_type v) const
{
    return std::binary_search(indices_.begin(), indices_.end(), v);
}

bool IndexSet::is_subset_of(const IndexSet& other) const
{
    return std::includes(other.indices_.begin(), other.indices_.end(), indices_.begin(), indices_.end());
}

IndexSet IndexSet::complement() const
{
    std::vector<value_type> out;
    out.reserve(ambient_ - indices_.size());
    std::size_t k = 0;
    for (std::size_t v = 0; v < ambient_; ++v) {
        if (k < indices_.size() && indices_[k] == v) {
            ++k;
        } else {
            out.push_back(static_cast<value_type>(v));
        }
    }
    return IndexSet(std::move(out), ambient_);
}

IndexSet IndexSet::united_with(const IndexSet& other) const
{
    if (other.ambient_ != ambient_) throw ShapeError("IndexSet: ambient mismatch in union");
    std::vector<value_type> out;
    std::set_union(indices_.begin(), indices_.end(), other.indices_.begin(), other.indices_.end(),
                   std::back_inserter(out));
    return IndexSet(std::move(out), ambient_);
}

std::vector<IndexSet::value_type> IndexSet::missing_from(const IndexSet& other) const
{
    std::vector<value_type> out;
    std::set_difference(indices_.begin(), indices_.end(), other.indices_.begin(), other.indices_.end(),
                        std::back_inserter(out));
    return out;
}

IndexSet difference_set(const IndexSet& set)
{
    if (set.empty()) throw DomainError("difference_set: empty index set");
    std::vector<char> seen(set.max() + 1, 0);
    for (std::size_t a = 0; a < set.size(); ++a) {
        for (std::size_t b = 0; b <= a; ++b) seen[set[a] - set[b]] = 1;
    }
    std::vector<IndexSet::value_type> lags;
    for (std::size_t d = 0; d < seen.size(); ++d) {
        if (seen[d]) lags.push_back(static_cast<IndexSet::value_type>(d));
    }
    return IndexSet(std::move(lags), set.ambient());
}

IndexSet cantor_array(unsigned order)
{
    if (order < 1) throw DomainError("cantor_array: order must be at least 1");
    using V = IndexSet::value_type;
    // Aperture 3^{order-1} + 1 must fit in the index type.
    std::uint64_t span = 1;
    for (unsigned k = 1; k < order; ++k) {
        span *= 3;
        if (span + 1 > std::numeric_limits<V>::max()) {
            throw CapacityError("cantor_array: order " + std::to_string(order) + " overflows the index type");
        }
    }
    std::vector<V> current{0, 1};
    std::uint64_t shift = 2; // 2 * 3^{k-1}
    for (unsigned k = 1; k < order; ++k) {
        const std::size_t count = current.size();
        for (std::size_t j = 0; j < count; ++j) current.push_back(static_cast<V>(current[j] + shift));
        shift *= 3;
    }
    return IndexSet(std::move(current), static_cast<std::size_t>(span + 1));
}

bool is_complete(const IndexSet& array)
{
    if (array.empty()) return false;
    return difference_set(array).is_full();
}

ComplexVector SelectionOperator::apply(const ComplexVector& x) const
{
    if (static_cast<std::size_t>(x.size()) != set_.ambient()) {
        throw ShapeError("select: vector length " + std::to_string(x.size()) + " does not match ambient " +
                         std::to_string(set_.ambient()));
    }
    ComplexVector out(static_cast<Index>(set_.size()));
    for (std::size_t k = 0; k < set_.size(); ++k) out[static_cast<Index>(k)] = x[set_[k]];
    return out;
}

ComplexVector SelectionOperator::embed(const ComplexVector& y) const
{
    if (static_cast<std::size_t>(y.size()) != set_.size()) throw ShapeError("embed: length mismatch");
    ComplexVector out = ComplexVector::Zero(static_cast<Index>(set_.ambient()));
    for (std::size_t k = 0; k < set_.size(); ++k) out[set_[k]] = y[static_cast<Index>(k)];
    return out;
}

ComplexMatrix SelectionOperator::compress(const ComplexMatrix& h) const
{
    if (static_cast<std::size_t>(h.rows()) != set_.ambient() || h.rows() != h.cols()) {
        throw ShapeError("compress: matrix shape mismatch");
    }
    const auto m = static_cast<Index>(set_.size());
    ComplexMatrix out(m, m);
    for (Index a = 0; a < m; ++a) {
        for (Index b = 0; b < m; ++b) out(a, b) = h(set_[a], set_[b]);
    }
    return out;
}

ComplexMatrix SelectionOperator::lift(const ComplexMatrix& s) const
{
    const auto m = static_cast<Index>(set_.size());
    if (s.rows() != m || s.cols() != m) throw ShapeError("lift: matrix shape mismatch");
    const auto n = static_cast<Index>(set_.ambient());
    ComplexMatrix out = ComplexMatrix::Zero(n, n);
    for (Index a = 0; a < m; ++a) {
        for (Index b = 0; b < m; ++b) out(set_[a], set_[b]) = s(a, b);
    }
    return out;
}

ComplexMatrix SelectionOperator::matrix() const
{
    ComplexMatrix p = ComplexMatrix::Zero(static_cast<Index>(set_.size()), static_cast<Index>(set_.ambient()));
    for (std::size_t k = 0; k < set_.size(); ++k) p(static_cast<Index>(k), set_[k]) = 1.0;
    return p;
}

ComplexVector select(const SelectionOperator& op, const ComplexVector& x)
{
    return op.apply(x);
}

bool CompressionReport::all_passed() const
{
    return std::all_of(conditions.begin(), conditions.end(), [](const auto& c) { return c.passed; });
}

std::string CompressionReport::failure_summary() const
{
    std::ostringstream os;
    bool first = true;
    for (const auto& c : conditions) {
        if (c.passed) continue;
        if (!first) os << "; ";
        os << c.name << " violated";
        if (!c.detail.empty()) os << " (" << c.detail << ")";
        first = false;
    }
    return os.str();
}

CompressionReport validate_compression(const IndexSet& compression, const IndexSet& omega,
                                       std::size_t sources)
{
    CompressionReport report;

    ConditionResult zero{"0 in I", compression.contains(0), ""};
    if (!zero.passed) zero.detail = "compression set does not contain index 0";
    report.conditions.push_back(zero);

    ConditionResult cover{"diff(I) subset of Omega", false, ""};
    if (compression.empty()) {
        cover.detail = "compression set is empty";
    } else if (compression.ambient() != omega.ambient()) {
        cover.detail = "ambient mismatch between I and Omega";
    } else {
        report.missing_lags = difference_set(compression).missing_from(omega);
        cover.passed = report.missing_lags.empty();
        if (!cover.passed) {
            std::ostringstream os;
            os << "missing lags:";
            for (auto lag : report.missing_lags) os << ' ' << lag;
            cover.detail = os.str();
        }
    }
    report.conditions.push_back(cover);

    ConditionResult count{"p < M", sources < compression.size(), ""};
    if (!count.passed) {
        count.detail = "p = " + std::to_string(sources) + ", M = " + std::to_string(compression.size());
    }
    report.conditions.push_back(count);
    return report;
}

} // namespace canm
