#pragma once

#include <fstream>

#include "anonchan/pairing.hpp"
#include "json.hpp"

namespace testutil {

using nlohmann::json;

inline const json& golden() {
    static const json v = [] {
        std::ifstream f(std::string(ANONCHAN_GOLDEN_DIR) + "/bn254_vectors.json");
        if (!f) throw std::runtime_error("golden vectors missing");
        return json::parse(f);
    }();
    return v;
}

inline anonchan::Bytes hex_bytes(const std::string& s) {
    std::string t = s.rfind("0x", 0) == 0 ? s.substr(2) : s;
    if (t.size() % 2) t.insert(t.begin(), '0');
    return anonchan::from_hex(t).value();
}

template <class F>
F field_from_hex(const std::string& s) {
    anonchan::Bytes b = hex_bytes(s);
    anonchan::Bytes padded(32 - b.size(), 0);
    anonchan::append(padded, b);
    return F::from_bytes(padded).value();
}

inline anonchan::Fq fq(const std::string& s) { return field_from_hex<anonchan::Fq>(s); }
inline anonchan::Fr fr(const std::string& s) { return field_from_hex<anonchan::Fr>(s); }

}  // namespace testutil
