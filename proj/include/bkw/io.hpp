#pragma once

#include "bkw/model.hpp"

#include <iosfwd>
#include <map>
#include <string>

namespace bkw {

// Binary sample format: magic "BKWS", version u16 LE, n u32 LE, q u64 LE,
// count u64 LE, flags byte (bit 0: b stored as 64-bit float; bit 1: residues
// packed to ceil(log2 q) bits), then the payload. The reader rejects files
// whose declared count mismatches the byte length.
struct SampleFileFlags {
    bool b_as_f64 = true;
    bool packed_residues = true;
};

void write_samples(std::ostream& os, const SampleList& list,
                   const SampleFileFlags& flags = {});
SampleList read_samples(std::istream& is);

void write_samples_file(const std::string& path, const SampleList& list,
                        const SampleFileFlags& flags = {});
SampleList read_samples_file(const std::string& path);

// Secret key file: plain text, one residue per line.
void write_key_file(const std::string& path, std::span<const std::int64_t> s);
std::vector<std::int64_t> read_key_file(const std::string& path);

// Flat key-value config with '#' comments.
using Config = std::map<std::string, std::string>;
Config parse_config(std::istream& is);
Config read_config_file(const std::string& path);
void write_config_file(const std::string& path, const Config& cfg);

// Writes via a temp name in the same directory, then renames atomically.
void atomic_write_file(const std::string& path, const std::string& contents);

// One JSON-lines diagnostics record with stable keys.
std::string diag_json_line(std::size_t step, std::size_t size, double bias_re, double bias_pred,
                           double ms);

} // namespace bkw
