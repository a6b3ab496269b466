#pragma once

#include <openssl/evp.h>

#include <array>
#include <stdexcept>

#include "anonchan/bytes.hpp"

namespace anonchan {

using Sha512Digest = std::array<uint8_t, 64>;

inline Sha512Digest sha512(ByteView data) {
    Sha512Digest out;
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), out.data(), &len, EVP_sha512(), nullptr) != 1 ||
        len != out.size()) {
        throw std::runtime_error("sha512 failed");
    }
    return out;
}

class Sha512 {
public:
    Sha512() : ctx_(EVP_MD_CTX_new()) {
        if (!ctx_ || EVP_DigestInit_ex(ctx_, EVP_sha512(), nullptr) != 1)
            throw std::runtime_error("sha512 init failed");
    }
    ~Sha512() { EVP_MD_CTX_free(ctx_); }
    Sha512(const Sha512&) = delete;
    Sha512& operator=(const Sha512&) = delete;

    Sha512& update(ByteView data) {
        if (EVP_DigestUpdate(ctx_, data.data(), data.size()) != 1)
            throw std::runtime_error("sha512 update failed");
        return *this;
    }
    Sha512& update(std::string_view s) {
        return update(ByteView(reinterpret_cast<const uint8_t*>(s.data()), s.size()));
    }

    Sha512Digest finish() {
        Sha512Digest out;
        unsigned int len = 0;
        if (EVP_DigestFinal_ex(ctx_, out.data(), &len) != 1 || len != out.size())
            throw std::runtime_error("sha512 final failed");
        return out;
    }

private:
    EVP_MD_CTX* ctx_;
};

}  // namespace anonchan
