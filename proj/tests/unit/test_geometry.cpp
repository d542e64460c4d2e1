#include <doctest.h>

#include <set>

#include "canm/error.hpp"
#include "canm/geometry.hpp"
#include "support.hpp"

using namespace canm;

namespace {

std::set<unsigned> brute_differences(const std::vector<unsigned>& s)
{
    std::set<unsigned> out;
    for (unsigned a : s) {
        for (unsigned b : s) {
            if (a >= b) out.insert(a - b);
        }
    }
    return out;
}

std::vector<unsigned> as_vector(const IndexSet& s)
{
    return {s.begin(), s.end()};
}

} // namespace

TEST_CASE("IndexSet validates its contents")
{
    CHECK_THROWS_AS(IndexSet({0, 2, 1}, 4), DomainError);
    CHECK_THROWS_AS(IndexSet({0, 4}, 4), DomainError);
    CHECK_THROWS_AS(IndexSet({1, 1}, 4), DomainError);
    const IndexSet s = IndexSet::from_unsorted({3, 0, 3, 1}, 5);
    CHECK(as_vector(s) == std::vector<unsigned>{0, 1, 3});
    CHECK(as_vector(s.complement()) == std::vector<unsigned>{2, 4});
    CHECK(s.contains(3));
    CHECK_FALSE(s.contains(2));
    CHECK(IndexSet::full(4).is_full());
    CHECK(as_vector(IndexSet::range(2, 4, 6)) == std::vector<unsigned>{2, 3, 4});
}

TEST_CASE("difference_set")
{
    CHECK(as_vector(difference_set(IndexSet({0}, 1))) == std::vector<unsigned>{0});
    CHECK(as_vector(difference_set(IndexSet({0, 1, 3}, 4))) == std::vector<unsigned>{0, 1, 2, 3});
    const IndexSet c3({0, 1, 2, 3, 6, 7, 8, 9}, 10);
    CHECK(difference_set(c3).is_full());

    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + rng() % 60;
        std::vector<IndexSet::value_type> idx;
        for (std::size_t k = 0; k < n; ++k) {
            if (rng() % 3 == 0) idx.push_back(static_cast<IndexSet::value_type>(k));
        }
        if (idx.empty()) idx.push_back(0);
        const IndexSet s(idx, n);
        const IndexSet d = difference_set(s);
        const auto want = brute_differences(as_vector(s));
        CHECK(as_vector(d) == std::vector<unsigned>(want.begin(), want.end()));
        CHECK(d.max() <= s.max());
        CHECK(d.size() <= s.size() * (s.size() - 1) / 2 + 1);
        CHECK(d.ambient() == s.ambient());
    }
}

TEST_CASE("cantor arrays")
{
    CHECK(as_vector(cantor_array(1)) == std::vector<unsigned>{0, 1});
    CHECK(as_vector(cantor_array(3)) == std::vector<unsigned>{0, 1, 2, 3, 6, 7, 8, 9});
    const std::size_t elements[] = {8, 16, 32, 64, 128};
    const std::size_t apertures[] = {10, 28, 82, 244, 730};
    for (unsigned k = 3; k <= 7; ++k) {
        const IndexSet c = cantor_array(k);
        CHECK(c.size() == elements[k - 3]);
        CHECK(c.ambient() == apertures[k - 3]);
        CHECK(c.max() + 1 == c.ambient());
        CHECK(is_complete(c));
    }
    for (unsigned k = 1; k < 8; ++k) {
        const IndexSet small = cantor_array(k);
        const IndexSet big = cantor_array(k + 1);
        std::vector<unsigned> head;
        for (auto v : big) {
            if (v < small.ambient()) head.push_back(v);
        }
        CHECK(head == as_vector(small));
    }
    CHECK_THROWS_AS(cantor_array(0), DomainError);
    CHECK_THROWS_AS(cantor_array(40), CapacityError);
}

TEST_CASE("is_complete")
{
    CHECK(is_complete(IndexSet::full(9)));
    CHECK_FALSE(is_complete(IndexSet({0, 1, 4}, 5)));
}

TEST_CASE("selection operator")
{
    ComplexVector x(3);
    x << 1.0, Complex(2, 1), -3.0;
    CHECK(SelectionOperator(IndexSet::full(3)).apply(x) == x);
    const ComplexVector first = SelectionOperator(IndexSet({0}, 3)).apply(x);
    CHECK(first.size() == 1);
    CHECK(first[0] == x[0]);
    const SelectionOperator op(IndexSet({0, 2}, 3));
    const ComplexVector ac = op.apply(x);
    CHECK(ac[0] == x[0]);
    CHECK(ac[1] == x[2]);
    CHECK(select(op, x) == ac);

    const ComplexVector back = op.embed(ac);
    CHECK(back[1] == Complex(0, 0));
    CHECK(op.apply(back) == ac);
    CHECK(op.embed(op.apply(back)) == back);

    std::mt19937_64 rng(3);
    const ComplexMatrix h = test::random_matrix(rng, 3, 3);
    const ComplexMatrix p = op.matrix();
    CHECK((op.compress(h) - p * h * p.adjoint()).norm() < 1e-14);
    const ComplexMatrix s = test::random_matrix(rng, 2, 2);
    CHECK((op.lift(s) - p.adjoint() * s * p).norm() < 1e-14);
}

TEST_CASE("validate_compression")
{
    for (std::size_t p = 0; p < 6; ++p) {
        const IndexSet i = IndexSet::range(0, static_cast<IndexSet::value_type>(p), 12);
        CHECK(validate_compression(i, difference_set(i), p).all_passed());
    }
    const CompressionReport no_zero = validate_compression(IndexSet({1, 2}, 4), IndexSet::full(4), 1);
    CHECK_FALSE(no_zero.all_passed());
    CHECK(no_zero.failure_summary().find("0 in I") != std::string::npos);

    const CompressionReport too_many = validate_compression(IndexSet({0, 1, 2}, 4), IndexSet::full(4), 3);
    CHECK(too_many.failure_summary().find("p < M violated") != std::string::npos);

    const CompressionReport missing = validate_compression(IndexSet({0, 1, 3}, 4), IndexSet({0, 1, 2}, 4), 1);
    CHECK_FALSE(missing.all_passed());
    CHECK(missing.missing_lags == std::vector<IndexSet::value_type>{3});
}
