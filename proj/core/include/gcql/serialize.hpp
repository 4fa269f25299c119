#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "gcql/types.hpp"

namespace gcql {

// Thrown on malformed input; offset is the byte position where decoding
// failed (or the record-relative position for record decoders).
class ParseError : public std::runtime_error {
 public:
  ParseError(size_t offset, const std::string& what)
      : std::runtime_error("parse error at byte " + std::to_string(offset) + ": " + what),
        offset_(offset) {}
  size_t offset() const { return offset_; }

 private:
  size_t offset_;
};

inline constexpr int kDatasetSchemaVersion = 1;

// Single-record codecs. All fields little-endian, fixed width; decode is the
// exact inverse of encode on every valid instance.
std::vector<uint8_t> encode_record(const Trajectory& t);
std::vector<uint8_t> encode_record(const RelabeledExample& e);
Trajectory decode_trajectory(const std::vector<uint8_t>& bytes);
RelabeledExample decode_example(const std::vector<uint8_t>& bytes);

// Dataset file: plain-text header (magic, schema-version, env-id, counts)
// followed by u32-length-prefixed binary trajectory records.
void save_dataset(const Dataset& d, const std::string& path);
Dataset load_dataset(const std::string& path);

// Buffer dump for debugging: same framing, example records.
void save_examples(const std::vector<RelabeledExample>& ex, const std::string& env_id,
                   const std::string& path);
std::vector<RelabeledExample> load_examples(const std::string& path);

// Checkpoint file: plain-text header (kind, dims, step, payload count)
// followed by the raw little-endian double payload. Reload is bit-exact.
struct Checkpoint {
  std::string kind;
  std::vector<int64_t> dims;
  int64_t step = 0;
  std::vector<double> data;
};

void save_checkpoint(const Checkpoint& c, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace gcql
