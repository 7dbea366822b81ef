#include "partition.hpp"

#include <algorithm>
#include <functional>

#include "errors.hpp"

namespace isoclass {

Partition::Partition(std::vector<uint32_t> exps) : exps_(std::move(exps)) {
    for (uint32_t e : exps_)
        if (e == 0) fail(errc::invalid_argument, "partition parts must be positive");
    std::sort(exps_.begin(), exps_.end(), std::greater<>());
}

Partition Partition::parse(const std::string& text) {
    std::vector<uint32_t> exps;
    size_t pos = 0;
    while (pos < text.size()) {
        while (pos < text.size() && (text[pos] == ' ' || text[pos] == ',')) pos++;
        if (pos >= text.size()) break;
        size_t end = pos;
        while (end < text.size() && text[end] >= '0' && text[end] <= '9') end++;
        if (end == pos) fail(errc::invalid_argument, "malformed partition: " + text);
        exps.push_back(uint32_t(std::stoul(text.substr(pos, end - pos))));
        pos = end;
        while (pos < text.size() && (text[pos] == ' ')) pos++;
        if (pos < text.size() && text[pos] != ',')
            fail(errc::invalid_argument, "malformed partition: " + text);
    }
    return Partition(std::move(exps));
}

uint64_t Partition::exp_sum() const {
    uint64_t s = 0;
    for (uint32_t e : exps_) s += e;
    return s;
}

bool Partition::even_multiplicities() const {
    for (size_t i = 0; i < exps_.size();) {
        size_t j = i;
        while (j < exps_.size() && exps_[j] == exps_[i]) j++;
        if ((j - i) % 2 != 0) return false;
        i = j;
    }
    return true;
}

std::string Partition::to_string() const {
    std::string s;
    for (size_t i = 0; i < exps_.size(); i++) {
        if (i) s += ",";
        s += std::to_string(exps_[i]);
    }
    return s;
}

std::string Partition::pretty(uint64_t p) const {
    if (exps_.empty()) return "0";
    std::string s;
    for (size_t i = 0; i < exps_.size(); i++) {
        if (i) s += " \xe2\x8a\x95 "; // direct-sum sign
        uint64_t q = 1;
        for (uint32_t j = 0; j < exps_[i]; j++) q *= p;
        s += "Z/" + std::to_string(q);
    }
    return s;
}

std::vector<Partition> partitions_of(uint32_t n) {
    std::vector<Partition> out;
    std::vector<uint32_t> cur;
    std::function<void(uint32_t, uint32_t)> rec = [&](uint32_t rem, uint32_t maxpart) {
        if (rem == 0) {
            out.emplace_back(cur);
            return;
        }
        for (uint32_t part = std::min(rem, maxpart); part >= 1; part--) {
            cur.push_back(part);
            rec(rem - part, part);
            cur.pop_back();
        }
    };
    rec(n, n == 0 ? 1 : n);
    return out;
}

} // namespace isoclass
