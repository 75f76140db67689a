#ifndef ANNC_BINARY_IO_HPP
#define ANNC_BINARY_IO_HPP

// Little-endian primitives shared by the dictionary and index file formats.

#include "annc/errors.hpp"

#include <bit>
#include <cstdint>
#include <istream>
#include <ostream>
#include <string>

namespace annc::io {

inline void put_u64(std::ostream& os, std::uint64_t v) {
    char b[8];
    for (int i = 0; i < 8; ++i) {
        b[i] = static_cast<char>((v >> (8 * i)) & 0xffu);
    }
    os.write(b, 8);
}

inline void put_u32(std::ostream& os, std::uint32_t v) {
    char b[4];
    for (int i = 0; i < 4; ++i) {
        b[i] = static_cast<char>((v >> (8 * i)) & 0xffu);
    }
    os.write(b, 4);
}

inline void put_u8(std::ostream& os, std::uint8_t v) { os.put(static_cast<char>(v)); }
inline void put_i64(std::ostream& os, std::int64_t v) { put_u64(os, static_cast<std::uint64_t>(v)); }
inline void put_f64(std::ostream& os, double v) { put_u64(os, std::bit_cast<std::uint64_t>(v)); }

inline void put_string(std::ostream& os, const std::string& s) {
    put_u32(os, static_cast<std::uint32_t>(s.size()));
    os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

inline void get_bytes(std::istream& is, char* out, std::size_t n) {
    is.read(out, static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(is.gcount()) != n) {
        throw corruption_error("unexpected end of file");
    }
}

inline std::uint64_t get_u64(std::istream& is) {
    unsigned char b[8];
    get_bytes(is, reinterpret_cast<char*>(b), 8);
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) {
        v = (v << 8) | b[i];
    }
    return v;
}

inline std::uint32_t get_u32(std::istream& is) {
    unsigned char b[4];
    get_bytes(is, reinterpret_cast<char*>(b), 4);
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) {
        v = (v << 8) | b[i];
    }
    return v;
}

inline std::uint8_t get_u8(std::istream& is) {
    char c;
    get_bytes(is, &c, 1);
    return static_cast<std::uint8_t>(c);
}

inline std::int64_t get_i64(std::istream& is) { return static_cast<std::int64_t>(get_u64(is)); }
inline double get_f64(std::istream& is) { return std::bit_cast<double>(get_u64(is)); }

inline std::string get_string(std::istream& is, std::size_t max_len = (1u << 20)) {
    const std::uint32_t n = get_u32(is);
    if (n > max_len) {
        throw corruption_error("string length " + std::to_string(n) + " is implausible");
    }
    std::string s(n, '\0');
    get_bytes(is, s.data(), n);
    return s;
}

} // namespace annc::io

#endif // ANNC_BINARY_IO_HPP
