#include "bkw/io.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace bkw {

namespace {

constexpr char kMagic[4] = {'B', 'K', 'W', 'S'};
constexpr std::uint16_t kVersion = 1;

void put_u16(std::ostream& os, std::uint16_t v) {
    char b[2] = {static_cast<char>(v & 0xff), static_cast<char>(v >> 8)};
    os.write(b, 2);
}
void put_u32(std::ostream& os, std::uint32_t v) {
    char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    os.write(b, 4);
}
void put_u64(std::ostream& os, std::uint64_t v) {
    char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    os.write(b, 8);
}
std::uint16_t get_u16(std::istream& is) {
    unsigned char b[2];
    is.read(reinterpret_cast<char*>(b), 2);
    return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
}
std::uint32_t get_u32(std::istream& is) {
    unsigned char b[4];
    is.read(reinterpret_cast<char*>(b), 4);
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | b[i];
    return v;
}
std::uint64_t get_u64(std::istream& is) {
    unsigned char b[8];
    is.read(reinterpret_cast<char*>(b), 8);
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
    return v;
}

unsigned bits_for(std::int64_t q) {
    unsigned bits = 1;
    while ((1LL << bits) < q) ++bits;
    return bits;
}

// LSB-first bit packing.
class BitWriter {
public:
    explicit BitWriter(std::ostream& os) : os_(os) {}
    void put(std::uint64_t v, unsigned bits) {
        acc_ |= (v & ((bits == 64 ? ~0ULL : ((1ULL << bits) - 1)))) << fill_;
        fill_ += bits;
        while (fill_ >= 8) {
            char c = static_cast<char>(acc_ & 0xff);
            os_.write(&c, 1);
            acc_ >>= 8;
            fill_ -= 8;
        }
    }
    void flush() {
        if (fill_ > 0) {
            char c = static_cast<char>(acc_ & 0xff);
            os_.write(&c, 1);
            acc_ = 0;
            fill_ = 0;
        }
    }

private:
    std::ostream& os_;
    std::uint64_t acc_ = 0;
    unsigned fill_ = 0;
};

class BitReader {
public:
    explicit BitReader(std::istream& is) : is_(is) {}
    std::uint64_t get(unsigned bits) {
        while (fill_ < bits) {
            unsigned char c;
            if (!is_.read(reinterpret_cast<char*>(&c), 1))
                throw std::runtime_error("sample file: truncated payload");
            acc_ |= static_cast<std::uint64_t>(c) << fill_;
            fill_ += 8;
        }
        std::uint64_t v = acc_ & ((bits == 64 ? ~0ULL : ((1ULL << bits) - 1)));
        acc_ >>= bits;
        fill_ -= bits;
        return v;
    }

private:
    std::istream& is_;
    std::uint64_t acc_ = 0;
    unsigned fill_ = 0;
};

} // namespace

void write_samples(std::ostream& os, const SampleList& list, const SampleFileFlags& flags) {
    os.write(kMagic, 4);
    put_u16(os, kVersion);
    put_u32(os, static_cast<std::uint32_t>(list.dim()));
    put_u64(os, static_cast<std::uint64_t>(list.q()));
    put_u64(os, list.size());
    unsigned char fb = (flags.b_as_f64 ? 1 : 0) | (flags.packed_residues ? 2 : 0);
    os.write(reinterpret_cast<const char*>(&fb), 1);

    const unsigned rbits = flags.packed_residues ? bits_for(list.q()) : 32;
    BitWriter bw(os);
    for (std::size_t i = 0; i < list.size(); ++i) {
        auto a = list.a(i);
        for (std::size_t j = 0; j < list.dim(); ++j)
            bw.put(static_cast<std::uint64_t>(a[j]), rbits);
        bw.flush(); // byte-align per sample for the b field
        if (flags.b_as_f64) {
            double b = list.b(i);
            std::uint64_t bits;
            std::memcpy(&bits, &b, 8);
            put_u64(os, bits);
        } else {
            put_u64(os, static_cast<std::uint64_t>(std::llround(list.b(i))));
        }
    }
}

SampleList read_samples(std::istream& is) {
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, kMagic, 4) != 0)
        throw std::runtime_error("sample file: bad magic");
    std::uint16_t version = get_u16(is);
    if (version != kVersion) throw std::runtime_error("sample file: unsupported version");
    std::uint32_t n = get_u32(is);
    std::uint64_t q = get_u64(is);
    std::uint64_t count = get_u64(is);
    unsigned char fb;
    is.read(reinterpret_cast<char*>(&fb), 1);
    if (!is) throw std::runtime_error("sample file: truncated header");
    const bool b_as_f64 = fb & 1;
    const bool packed = fb & 2;

    // Validate declared count against the remaining byte length.
    const unsigned rbits = packed ? bits_for(static_cast<std::int64_t>(q)) : 32;
    const std::uint64_t per_sample =
        (static_cast<std::uint64_t>(n) * rbits + 7) / 8 + 8;
    std::streampos here = is.tellg();
    is.seekg(0, std::ios::end);
    std::streampos end = is.tellg();
    is.seekg(here);
    if (static_cast<std::uint64_t>(end - here) != per_sample * count)
        throw std::runtime_error("sample file: declared count mismatches byte length");

    SampleList list(n, static_cast<std::int64_t>(q));
    list.reserve(count);
    std::vector<std::int64_t> a(n);
    for (std::uint64_t i = 0; i < count; ++i) {
        BitReader br(is);
        for (std::uint32_t j = 0; j < n; ++j)
            a[j] = static_cast<std::int64_t>(br.get(rbits));
        double b;
        std::uint64_t bits = get_u64(is);
        if (b_as_f64) std::memcpy(&b, &bits, 8);
        else b = static_cast<double>(bits);
        list.push(a, b);
    }
    return list;
}

void write_samples_file(const std::string& path, const SampleList& list,
                        const SampleFileFlags& flags) {
    std::ostringstream os(std::ios::binary);
    write_samples(os, list, flags);
    atomic_write_file(path, os.str());
}

SampleList read_samples_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open " + path);
    return read_samples(is);
}

void write_key_file(const std::string& path, std::span<const std::int64_t> s) {
    std::ostringstream os;
    for (auto v : s) os << v << "\n";
    atomic_write_file(path, os.str());
}

std::vector<std::int64_t> read_key_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open " + path);
    std::vector<std::int64_t> s;
    std::int64_t v;
    while (is >> v) s.push_back(v);
    return s;
}

Config parse_config(std::istream& is) {
    Config cfg;
    std::string line;
    while (std::getline(is, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            auto b = s.find_first_not_of(" \t\r");
            auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (!key.empty()) cfg[key] = val;
    }
    return cfg;
}

Config read_config_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open " + path);
    return parse_config(is);
}

void write_config_file(const std::string& path, const Config& cfg) {
    std::ostringstream os;
    for (const auto& [k, v] : cfg) os << k << " = " << v << "\n";
    atomic_write_file(path, os.str());
}

void atomic_write_file(const std::string& path, const std::string& contents) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw std::runtime_error("cannot open " + tmp);
        os.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        if (!os) throw std::runtime_error("write failed: " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw std::runtime_error("rename failed: " + path);
}

std::string diag_json_line(std::size_t step, std::size_t size, double bias_re, double bias_pred,
                           double ms) {
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "{\"step\":%zu,\"size\":%zu,\"bias_re\":%.6g,\"bias_pred\":%.6g,\"ms\":%.3f}",
                  step, size, bias_re, bias_pred, ms);
    return buf;
}

} // namespace bkw
