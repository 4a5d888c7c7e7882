#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "darja/error.hpp"

namespace darja::io {

// Little-endian writer for the versioned artifact formats.
class Writer {
public:
    void bytes(std::string_view b) { buf_.append(b); }

    template <typename T>
    void put(T value) {
        static_assert(std::is_arithmetic_v<T>);
        unsigned char raw[sizeof(T)];
        std::memcpy(raw, &value, sizeof(T));
        if constexpr (std::endian::native == std::endian::big) {
            for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(raw[i], raw[sizeof(T) - 1 - i]);
        }
        buf_.append(reinterpret_cast<const char*>(raw), sizeof(T));
    }

    void str(std::string_view s) {
        put<std::uint32_t>(static_cast<std::uint32_t>(s.size()));
        buf_.append(s);
    }

    const std::string& data() const { return buf_; }

private:
    std::string buf_;
};

// Bounds-checked reader; every failure names the byte offset.
class Reader {
public:
    Reader(std::string_view data, std::string what) : data_(data), what_(std::move(what)) {}

    std::string_view bytes(std::size_t n) {
        need(n);
        auto out = data_.substr(pos_, n);
        pos_ += n;
        return out;
    }

    template <typename T>
    T get() {
        static_assert(std::is_arithmetic_v<T>);
        need(sizeof(T));
        unsigned char raw[sizeof(T)];
        std::memcpy(raw, data_.data() + pos_, sizeof(T));
        if constexpr (std::endian::native == std::endian::big) {
            for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(raw[i], raw[sizeof(T) - 1 - i]);
        }
        pos_ += sizeof(T);
        T value;
        std::memcpy(&value, raw, sizeof(T));
        return value;
    }

    std::string str() {
        const auto n = get<std::uint32_t>();
        return std::string(bytes(n));
    }

    std::size_t offset() const { return pos_; }
    bool at_end() const { return pos_ == data_.size(); }

    [[noreturn]] void fail(const std::string& msg) const { fail_at(pos_, msg); }

    [[noreturn]] void fail_at(std::size_t offset, const std::string& msg) const {
        throw FormatError(what_ + ": " + msg + " at offset " + std::to_string(offset));
    }

    void expect_end() const {
        if (!at_end()) fail("trailing bytes");
    }

private:
    void need(std::size_t n) const {
        if (data_.size() - pos_ < n) fail("truncated file");
    }

    std::string_view data_;
    std::string what_;
    std::size_t pos_ = 0;
};

std::string read_file(const std::string& path);
void write_file_atomic(const std::string& path, std::string_view data);

}  // namespace darja::io
