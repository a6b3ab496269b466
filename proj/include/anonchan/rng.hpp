#pragma once

#include <unistd.h>

#include <cstdint>
#include <stdexcept>

#include "anonchan/bytes.hpp"
#include "anonchan/hash.hpp"

namespace anonchan {

class RandomSource {
public:
    virtual ~RandomSource() = default;
    virtual void fill(std::span<uint8_t> out) = 0;

    Bytes bytes(size_t n) {
        Bytes b(n);
        fill(b);
        return b;
    }
};

// OS entropy
class SystemRandom final : public RandomSource {
public:
    void fill(std::span<uint8_t> out) override {
        size_t off = 0;
        while (off < out.size()) {
            size_t chunk = std::min<size_t>(out.size() - off, 256);
            if (getentropy(out.data() + off, chunk) != 0)
                throw std::runtime_error("getentropy failed");
            off += chunk;
        }
    }
};

inline SystemRandom& system_random() {
    static SystemRandom rng;
    return rng;
}

// SHA-512 counter stream, for reproducible tests and harness runs
class DeterministicRandom final : public RandomSource {
public:
    explicit DeterministicRandom(uint64_t seed) : counter_(0) {
        Bytes s;
        append(s, std::string_view("ANC1-DRBG"));
        append_u32be(s, static_cast<uint32_t>(seed >> 32));
        append_u32be(s, static_cast<uint32_t>(seed));
        seed_ = sha512(s);
    }

    void fill(std::span<uint8_t> out) override {
        size_t off = 0;
        while (off < out.size()) {
            if (avail_ == 0) refill();
            size_t n = std::min<size_t>(out.size() - off, avail_);
            std::memcpy(out.data() + off, block_.data() + (block_.size() - avail_), n);
            avail_ -= n;
            off += n;
        }
    }

private:
    void refill() {
        Bytes s(seed_.begin(), seed_.end());
        append_u32be(s, static_cast<uint32_t>(counter_ >> 32));
        append_u32be(s, static_cast<uint32_t>(counter_));
        ++counter_;
        block_ = sha512(s);
        avail_ = block_.size();
    }

    Sha512Digest seed_{};
    Sha512Digest block_{};
    size_t avail_ = 0;
    uint64_t counter_;
};

}  // namespace anonchan
