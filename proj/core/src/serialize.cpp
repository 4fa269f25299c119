#include "gcql/serialize.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

namespace gcql {
namespace {

constexpr char kDatasetMagic[] = "GCQL-DATASET";
constexpr char kExamplesMagic[] = "GCQL-EXAMPLES";
constexpr uint8_t kTagTrajectory = 1;
constexpr uint8_t kTagExample = 2;

class ByteWriter {
 public:
  void u8(uint8_t v) { buf_.push_back(v); }
  void u32(uint32_t v) {
    for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<uint8_t>(v >> (8 * i)));
  }
  void i32(int32_t v) { u32(static_cast<uint32_t>(v)); }
  void f64(double v) {
    uint64_t bits = std::bit_cast<uint64_t>(v);
    for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<uint8_t>(bits >> (8 * i)));
  }
  void str(const std::string& s) {
    u32(static_cast<uint32_t>(s.size()));
    buf_.insert(buf_.end(), s.begin(), s.end());
  }
  std::vector<uint8_t> take() { return std::move(buf_); }

 private:
  std::vector<uint8_t> buf_;
};

class ByteReader {
 public:
  ByteReader(const uint8_t* data, size_t size, size_t base_offset = 0)
      : data_(data), size_(size), base_(base_offset) {}

  uint8_t u8() {
    need(1, "u8");
    return data_[pos_++];
  }
  uint32_t u32() {
    need(4, "u32");
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(data_[pos_ + i]) << (8 * i);
    pos_ += 4;
    return v;
  }
  int32_t i32() { return static_cast<int32_t>(u32()); }
  double f64() {
    need(8, "f64");
    uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<uint64_t>(data_[pos_ + i]) << (8 * i);
    pos_ += 8;
    return std::bit_cast<double>(bits);
  }
  std::string str() {
    uint32_t n = u32();
    need(n, "string payload");
    std::string s(reinterpret_cast<const char*>(data_ + pos_), n);
    pos_ += n;
    return s;
  }
  size_t offset() const { return base_ + pos_; }
  bool exhausted() const { return pos_ == size_; }

 private:
  void need(size_t n, const char* what) {
    if (pos_ + n > size_)
      throw ParseError(base_ + pos_, std::string("truncated input reading ") + what);
  }
  const uint8_t* data_;
  size_t size_;
  size_t base_;
  size_t pos_ = 0;
};

void write_state(ByteWriter& w, const State& s) {
  w.u8(static_cast<uint8_t>(s.kind));
  if (s.kind == StateKind::Tabular) {
    w.i32(s.index);
  } else {
    w.u32(static_cast<uint32_t>(s.vec.size()));
    for (double v : s.vec) w.f64(v);
  }
}

State read_state(ByteReader& r) {
  State s;
  uint8_t kind = r.u8();
  if (kind > 2) throw ParseError(r.offset() - 1, "invalid state kind " + std::to_string(kind));
  s.kind = static_cast<StateKind>(kind);
  if (s.kind == StateKind::Tabular) {
    s.index = r.i32();
  } else {
    uint32_t n = r.u32();
    s.vec.resize(n);
    for (uint32_t i = 0; i < n; ++i) s.vec[i] = r.f64();
  }
  return s;
}

void write_action(ByteWriter& w, const Action& a) {
  w.u8(static_cast<uint8_t>(a.kind));
  if (a.kind == ActionKind::Discrete) {
    w.i32(a.id);
  } else {
    w.u32(static_cast<uint32_t>(a.vec.size()));
    for (double v : a.vec) w.f64(v);
  }
}

Action read_action(ByteReader& r) {
  Action a;
  uint8_t kind = r.u8();
  if (kind > 1) throw ParseError(r.offset() - 1, "invalid action kind " + std::to_string(kind));
  a.kind = static_cast<ActionKind>(kind);
  if (a.kind == ActionKind::Discrete) {
    a.id = r.i32();
  } else {
    uint32_t n = r.u32();
    a.vec.resize(n);
    for (uint32_t i = 0; i < n; ++i) a.vec[i] = r.f64();
  }
  return a;
}

}  // namespace

std::vector<uint8_t> encode_record(const Trajectory& t) {
  ByteWriter w;
  w.u8(kTagTrajectory);
  w.str(t.env_id);
  w.f64(t.competence);
  w.u32(static_cast<uint32_t>(t.states.size()));
  for (const auto& s : t.states) write_state(w, s);
  w.u32(static_cast<uint32_t>(t.actions.size()));
  for (const auto& a : t.actions) write_action(w, a);
  return w.take();
}

Trajectory decode_trajectory(const std::vector<uint8_t>& bytes) {
  if (bytes.empty()) throw ParseError(0, "empty record");
  ByteReader r(bytes.data(), bytes.size());
  uint8_t tag = r.u8();
  if (tag != kTagTrajectory)
    throw ParseError(0, "record tag " + std::to_string(tag) + " is not a trajectory");
  Trajectory t;
  t.env_id = r.str();
  t.competence = r.f64();
  uint32_t ns = r.u32();
  t.states.reserve(ns);
  for (uint32_t i = 0; i < ns; ++i) t.states.push_back(read_state(r));
  uint32_t na = r.u32();
  t.actions.reserve(na);
  for (uint32_t i = 0; i < na; ++i) t.actions.push_back(read_action(r));
  if (!r.exhausted()) throw ParseError(r.offset(), "trailing bytes after trajectory record");
  if (t.states.size() != t.actions.size() + 1)
    throw ParseError(r.offset(), "trajectory with " + std::to_string(t.states.size()) +
                                     " states and " + std::to_string(t.actions.size()) +
                                     " actions");
  return t;
}

std::vector<uint8_t> encode_record(const RelabeledExample& e) {
  ByteWriter w;
  w.u8(kTagExample);
  write_state(w, e.state);
  write_action(w, e.action);
  write_state(w, e.next_state);
  write_state(w, e.goal.target);
  w.u8(e.goal.null_goal ? 1 : 0);
  w.u8(static_cast<uint8_t>(e.label));
  w.u8(e.terminal ? 1 : 0);
  w.f64(e.reward);
  w.u8(e.has_stored_value ? 1 : 0);
  return w.take();
}

RelabeledExample decode_example(const std::vector<uint8_t>& bytes) {
  if (bytes.empty()) throw ParseError(0, "empty record");
  ByteReader r(bytes.data(), bytes.size());
  uint8_t tag = r.u8();
  if (tag != kTagExample)
    throw ParseError(0, "record tag " + std::to_string(tag) + " is not an example");
  RelabeledExample e;
  e.state = read_state(r);
  e.action = read_action(r);
  e.next_state = read_state(r);
  e.goal.target = read_state(r);
  e.goal.null_goal = r.u8() != 0;
  uint8_t label = r.u8();
  if (label > 4) throw ParseError(r.offset() - 1, "invalid label kind " + std::to_string(label));
  e.label = static_cast<LabelKind>(label);
  e.terminal = r.u8() != 0;
  e.reward = r.f64();
  e.has_stored_value = r.u8() != 0;
  if (!r.exhausted()) throw ParseError(r.offset(), "trailing bytes after example record");
  return e;
}

namespace {

void write_framed(std::ostream& out, const std::vector<uint8_t>& rec) {
  uint32_t len = static_cast<uint32_t>(rec.size());
  uint8_t hdr[4];
  for (int i = 0; i < 4; ++i) hdr[i] = static_cast<uint8_t>(len >> (8 * i));
  out.write(reinterpret_cast<const char*>(hdr), 4);
  out.write(reinterpret_cast<const char*>(rec.data()), static_cast<std::streamsize>(rec.size()));
}

struct Header {
  std::string magic;
  int version = 0;
  std::string env_id;
  size_t records = 0;
  size_t transitions = 0;
  size_t header_bytes = 0;
};

Header read_header(std::istream& in, const std::string& expect_magic) {
  Header h;
  std::string line;
  size_t offset = 0;
  auto next_line = [&]() {
    if (!std::getline(in, line)) throw ParseError(offset, "truncated header");
    size_t n = line.size() + 1;
    offset += n;
    return line;
  };
  {
    std::istringstream ls(next_line());
    ls >> h.magic >> h.version;
    if (h.magic != expect_magic)
      throw ParseError(0, "bad magic '" + h.magic + "', expected " + expect_magic);
    if (h.version != kDatasetSchemaVersion)
      throw ParseError(0, "unsupported schema-version " + std::to_string(h.version) +
                              " (supported: " + std::to_string(kDatasetSchemaVersion) + ")");
  }
  while (true) {
    std::string l = next_line();
    if (l == "end-header") break;
    std::istringstream ls(l);
    std::string key;
    ls >> key;
    if (key == "env-id") {
      ls >> h.env_id;
    } else if (key == "records") {
      ls >> h.records;
    } else if (key == "transitions") {
      ls >> h.transitions;
    } else {
      throw ParseError(offset - l.size() - 1, "unknown header field '" + key + "'");
    }
  }
  h.header_bytes = offset;
  return h;
}

std::vector<std::vector<uint8_t>> read_framed_records(std::istream& in, size_t count,
                                                      size_t offset) {
  std::vector<std::vector<uint8_t>> out;
  out.reserve(count);
  for (size_t i = 0; i < count; ++i) {
    uint8_t hdr[4];
    if (!in.read(reinterpret_cast<char*>(hdr), 4))
      throw ParseError(offset, "truncated record length prefix");
    uint32_t len = 0;
    for (int b = 0; b < 4; ++b) len |= static_cast<uint32_t>(hdr[b]) << (8 * b);
    offset += 4;
    std::vector<uint8_t> rec(len);
    if (len > 0 && !in.read(reinterpret_cast<char*>(rec.data()), len))
      throw ParseError(offset, "truncated record payload (wanted " + std::to_string(len) +
                                   " bytes)");
    offset += len;
    out.push_back(std::move(rec));
  }
  return out;
}

}  // namespace

void save_dataset(const Dataset& d, const std::string& path) {
  if (d.trajectories.empty())
    throw std::invalid_argument("save_dataset: dataset must be non-empty");
  for (const auto& t : d.trajectories)
    if (t.env_id != d.env_id)
      throw std::invalid_argument("save_dataset: trajectory env-id '" + t.env_id +
                                  "' does not match dataset env-id '" + d.env_id + "'");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("save_dataset: cannot open " + path);
  out << kDatasetMagic << ' ' << d.schema_version << '\n';
  out << "env-id " << d.env_id << '\n';
  out << "records " << d.trajectories.size() << '\n';
  out << "transitions " << d.num_transitions() << '\n';
  out << "end-header\n";
  for (const auto& t : d.trajectories) write_framed(out, encode_record(t));
  if (!out) throw std::runtime_error("save_dataset: write failed for " + path);
}

Dataset load_dataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_dataset: cannot open " + path);
  Header h = read_header(in, kDatasetMagic);
  Dataset d;
  d.env_id = h.env_id;
  d.schema_version = h.version;
  size_t offset = h.header_bytes;
  for (auto& rec : read_framed_records(in, h.records, offset)) {
    d.trajectories.push_back(decode_trajectory(rec));
    if (d.trajectories.back().env_id != d.env_id)
      throw ParseError(offset, "trajectory env-id mismatch in dataset");
  }
  if (d.trajectories.empty()) throw ParseError(h.header_bytes, "dataset has no records");
  if (d.num_transitions() != h.transitions)
    throw ParseError(h.header_bytes,
                     "transition count mismatch: header says " + std::to_string(h.transitions) +
                         ", records contain " + std::to_string(d.num_transitions()));
  return d;
}

void save_examples(const std::vector<RelabeledExample>& ex, const std::string& env_id,
                   const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("save_examples: cannot open " + path);
  out << kExamplesMagic << ' ' << kDatasetSchemaVersion << '\n';
  out << "env-id " << env_id << '\n';
  out << "records " << ex.size() << '\n';
  out << "end-header\n";
  for (const auto& e : ex) write_framed(out, encode_record(e));
  if (!out) throw std::runtime_error("save_examples: write failed for " + path);
}

std::vector<RelabeledExample> load_examples(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_examples: cannot open " + path);
  Header h = read_header(in, kExamplesMagic);
  std::vector<RelabeledExample> out;
  for (auto& rec : read_framed_records(in, h.records, h.header_bytes))
    out.push_back(decode_example(rec));
  return out;
}

void save_checkpoint(const Checkpoint& c, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("save_checkpoint: cannot open " + path);
  out << "GCQL-CKPT " << kDatasetSchemaVersion << '\n';
  out << "kind " << c.kind << '\n';
  out << "dims";
  for (int64_t d : c.dims) out << ' ' << d;
  out << '\n';
  out << "step " << c.step << '\n';
  out << "payload " << c.data.size() << '\n';
  out << "end-header\n";
  for (double v : c.data) {
    uint64_t bits = std::bit_cast<uint64_t>(v);
    uint8_t buf[8];
    for (int i = 0; i < 8; ++i) buf[i] = static_cast<uint8_t>(bits >> (8 * i));
    out.write(reinterpret_cast<const char*>(buf), 8);
  }
  if (!out) throw std::runtime_error("save_checkpoint: write failed for " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_checkpoint: cannot open " + path);
  Checkpoint c;
  std::string line;
  size_t offset = 0;
  auto next_line = [&]() {
    if (!std::getline(in, line)) throw ParseError(offset, "truncated checkpoint header");
    offset += line.size() + 1;
    return line;
  };
  {
    std::istringstream ls(next_line());
    std::string magic;
    int version = 0;
    ls >> magic >> version;
    if (magic != "GCQL-CKPT") throw ParseError(0, "bad checkpoint magic '" + magic + "'");
    if (version != kDatasetSchemaVersion)
      throw ParseError(0, "unsupported checkpoint schema-version " + std::to_string(version));
  }
  size_t payload = 0;
  while (true) {
    std::string l = next_line();
    if (l == "end-header") break;
    std::istringstream ls(l);
    std::string key;
    ls >> key;
    if (key == "kind") {
      ls >> c.kind;
    } else if (key == "dims") {
      int64_t d;
      while (ls >> d) c.dims.push_back(d);
    } else if (key == "step") {
      ls >> c.step;
    } else if (key == "payload") {
      ls >> payload;
    } else {
      throw ParseError(offset - l.size() - 1, "unknown checkpoint field '" + key + "'");
    }
  }
  c.data.resize(payload);
  for (size_t i = 0; i < payload; ++i) {
    uint8_t buf[8];
    if (!in.read(reinterpret_cast<char*>(buf), 8))
      throw ParseError(offset + 8 * i, "truncated checkpoint payload");
    uint64_t bits = 0;
    for (int b = 0; b < 8; ++b) bits |= static_cast<uint64_t>(buf[b]) << (8 * b);
    c.data[i] = std::bit_cast<double>(bits);
  }
  return c;
}

}  // namespace gcql
