#include "wgfb/element_store.hpp"

#include <algorithm>

namespace wgfb {

Family::Family(std::string label, int rank, std::size_t length, std::size_t depth)
    : label_(std::move(label)), rank_(rank), length_(length), depth_(std::max<std::size_t>(depth, 1)),
      data_(length_ * depth_) {}

Family& ElementStore::add(std::string label, int rank, std::size_t length, std::size_t depth) {
    if (contains(label)) throw Error("duplicate element family " + label);
    families_.push_back(std::make_unique<Family>(std::move(label), rank, length, depth));
    return *families_.back();
}

bool ElementStore::contains(const std::string& label) const {
    return std::any_of(families_.begin(), families_.end(), [&](const auto& f) { return f->label() == label; });
}

Family& ElementStore::get(const std::string& label) {
    for (auto& f : families_)
        if (f->label() == label) return *f;
    throw Error("no element family " + label);
}

const Family& ElementStore::get(const std::string& label) const {
    for (const auto& f : families_)
        if (f->label() == label) return *f;
    throw Error("no element family " + label);
}

StoreReport ElementStore::report() const {
    StoreReport r;
    r.families = families_.size();
    for (const auto& f : families_) {
        r.elements_per_step += f->length();
        r.bytes += f->bytes();
    }
    return r;
}

}  // namespace wgfb
