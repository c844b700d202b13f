#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "wgfb/types.hpp"

namespace wgfb {

/// One family of single-time matrix elements, e.g. <g,t'|s-(t)|g,2> for
/// all auxiliary t'. Rank 0 is a scalar, rank 1 a line over the auxiliary
/// axis, rank 2 a sheet over (t', t''). Symmetric sheets are packed on
/// t' <= t''. Values of the last `depth` steps are kept in a ring.
class Family {
public:
    Family(std::string label, int rank, std::size_t length, std::size_t depth);

    const std::string& label() const { return label_; }
    int rank() const { return rank_; }
    std::size_t length() const { return length_; }
    std::size_t depth() const { return depth_; }
    std::size_t bytes() const { return data_.size() * sizeof(cplx); }

    std::span<cplx> at(std::size_t step) {
        return {data_.data() + (step % depth_) * length_, length_};
    }
    std::span<const cplx> at(std::size_t step) const {
        return {data_.data() + (step % depth_) * length_, length_};
    }
    cplx& scalar(std::size_t step) { return data_[(step % depth_) * length_]; }
    cplx scalar(std::size_t step) const { return data_[(step % depth_) * length_]; }

private:
    std::string label_;
    int rank_;
    std::size_t length_;
    std::size_t depth_;
    std::vector<cplx> data_;
};

struct StoreReport {
    std::size_t families = 0;
    std::size_t elements_per_step = 0;  // complex values in one time slice
    std::size_t bytes = 0;              // total including history
};

/// Owner of all element families for one run. Memory is allocated once at
/// construction time and never grows.
class ElementStore {
public:
    Family& add(std::string label, int rank, std::size_t length, std::size_t depth);
    Family& get(const std::string& label);
    const Family& get(const std::string& label) const;
    bool contains(const std::string& label) const;

    std::span<const std::unique_ptr<Family>> families() const { return families_; }
    StoreReport report() const;

private:
    std::vector<std::unique_ptr<Family>> families_;
};

/// Packed index of (i, j), i <= j, in a symmetric n x n sheet.
inline std::size_t packed_index(std::size_t i, std::size_t j, std::size_t n) {
    if (i > j) std::swap(i, j);
    return i * n - i * (i - 1) / 2 + (j - i);
}
inline std::size_t packed_size(std::size_t n) { return n * (n + 1) / 2; }

}  // namespace wgfb
