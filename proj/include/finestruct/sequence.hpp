#pragma once

#include <finestruct/real.hpp>

#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

namespace finestruct {

namespace detail {
template <class T>
inline bool value_is_finite(const T&) {
    return true;  // exact integer/rational types cannot overflow
}
inline bool value_is_finite(const Real& x) {
    return mpfr_number_p(x.backend().data()) != 0;
}
}  // namespace detail

// A finite sampled sequence with ambient indexing: entry j of `values` lives
// at ambient index offset + j. Index shifts are bookkeeping on `offset`,
// never materialized copies.
template <class T>
struct Sequence {
    std::vector<T> values;
    long offset = 0;

    explicit Sequence(std::vector<T> v, long off = 0) : values(std::move(v)), offset(off) {
        if (values.empty())
            throw std::invalid_argument("Sequence: need at least one value");
        for (const T& x : values)
            if (!detail::value_is_finite(x))
                throw std::invalid_argument("Sequence: values must be finite");
    }

    std::size_t size() const { return values.size(); }
    long first_index() const { return offset; }
    long last_index() const { return offset + static_cast<long>(values.size()) - 1; }

    const T& at(long ambient) const {
        if (ambient < first_index() || ambient > last_index())
            throw std::out_of_range("Sequence: index outside the sampled window");
        return values[static_cast<std::size_t>(ambient - offset)];
    }
};

}  // namespace finestruct
