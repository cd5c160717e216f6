#pragma once

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace faitheval {

// Little-endian binary container I/O used by the checkpoint and golden-set
// file formats. Doubles are stored as their raw IEEE-754 bit patterns so a
// write/read round trip is bit-exact.

class BinaryWriter {
public:
    explicit BinaryWriter(const std::filesystem::path& path)
        : out_(path, std::ios::binary | std::ios::trunc) {
        if (!out_) throw std::runtime_error("cannot open file for writing: " + path.string());
    }

    void u32(std::uint32_t v) { raw_int(v, 4); }
    void u64(std::uint64_t v) { raw_int(v, 8); }

    void f64(double v) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, 8);
        u64(bits);
    }

    void str(const std::string& s) {
        u32(static_cast<std::uint32_t>(s.size()));
        out_.write(s.data(), static_cast<std::streamsize>(s.size()));
    }

    void f64_vec(const std::vector<double>& v) {
        u64(v.size());
        for (double x : v) f64(x);
    }

    void close() {
        out_.close();
        if (!out_) throw std::runtime_error("write failed");
    }

private:
    void raw_int(std::uint64_t v, int bytes) {
        char buf[8];
        for (int i = 0; i < bytes; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
        out_.write(buf, bytes);
    }

    std::ofstream out_;
};

class BinaryReader {
public:
    explicit BinaryReader(const std::filesystem::path& path)
        : in_(path, std::ios::binary) {
        if (!in_) throw std::runtime_error("cannot open file for reading: " + path.string());
    }

    std::uint32_t u32() { return static_cast<std::uint32_t>(raw_int(4)); }
    std::uint64_t u64() { return raw_int(8); }

    double f64() {
        const std::uint64_t bits = u64();
        double v;
        std::memcpy(&v, &bits, 8);
        return v;
    }

    std::string str() {
        const std::uint32_t n = u32();
        std::string s(n, '\0');
        in_.read(s.data(), n);
        check();
        return s;
    }

    std::vector<double> f64_vec() {
        const std::uint64_t n = u64();
        std::vector<double> v(n);
        for (auto& x : v) x = f64();
        return v;
    }

private:
    std::uint64_t raw_int(int bytes) {
        char buf[8];
        in_.read(buf, bytes);
        check();
        std::uint64_t v = 0;
        for (int i = 0; i < bytes; ++i) {
            v |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf[i])) << (8 * i);
        }
        return v;
    }

    void check() {
        if (!in_) throw std::runtime_error("unexpected end of file");
    }

    std::ifstream in_;
};

}  // namespace faitheval
