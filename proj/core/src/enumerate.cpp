#include "diagline/enumerate.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <memory>
#include <numeric>
#include <queue>
#include <sstream>
#include <unordered_map>

#include "diagline/errors.hpp"
#include "diagline/util.hpp"

namespace diagline {

std::string to_string(CountMethod m) { return m == CountMethod::naive ? "naive" : "mitm"; }

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

constexpr std::uint64_t kEmpty = ~std::uint64_t{0};
constexpr std::size_t kBlocks = 64;

std::string power_system_digest(const PowerSystem& sys) {
  std::ostringstream os;
  os << "k=" << sys.k << ";lo=" << sys.lo << ";hi=" << sys.hi << ";A=";
  for (const auto& row : sys.rows) {
    for (const auto& v : row) os << v << ',';
    os << '|';
  }
  return hex64(fnv1a64(os.str()));
}

void validate(const PowerSystem& sys) {
  if (sys.k < 1 || static_cast<int>(sys.rows.size()) != sys.k)
    throw InvalidInput("power system needs k >= 1 rows");
  if (sys.s() < 1) throw InvalidInput("power system needs at least one variable");
  for (const auto& row : sys.rows)
    if (static_cast<int>(row.size()) != sys.s()) throw InvalidInput("ragged coefficient rows");
  if (sys.lo > sys.hi) throw InvalidInput("empty box");
}

// Largest |v| over the box.
BigInt box_radius(const PowerSystem& sys) {
  return std::max(abs(BigInt(sys.lo)), abs(BigInt(sys.hi)));
}

// bound[j] = sum over `idx` of max_v |A[j][i] v^j|.
std::vector<BigInt> partial_bounds(const PowerSystem& sys, std::span<const int> idx) {
  const BigInt r = box_radius(sys);
  std::vector<BigInt> out(static_cast<std::size_t>(sys.k), BigInt(0));
  for (int j = 1; j <= sys.k; ++j) {
    const BigInt rj = big_pow(r, static_cast<unsigned>(j));
    for (int i : idx) out[static_cast<std::size_t>(j - 1)] += abs(sys.rows[static_cast<std::size_t>(j - 1)][static_cast<std::size_t>(i)]) * rj;
  }
  return out;
}

bool bounds_fit_i64(const std::vector<BigInt>& b) {
  const BigInt lim = BigInt(1) << 62;
  for (const auto& v : b)
    if (v >= lim) return false;
  return true;
}

// Per-coordinate contribution table: cv[(v - lo) * k + (j - 1)] = A[j][i] v^j.
std::vector<std::int64_t> contributions(const PowerSystem& sys, int i) {
  const std::int64_t width = sys.hi - sys.lo + 1;
  std::vector<std::int64_t> cv(static_cast<std::size_t>(width * sys.k));
  for (std::int64_t d = 0; d < width; ++d) {
    const std::int64_t v = sys.lo + d;
    i128 pw = 1;
    for (int j = 1; j <= sys.k; ++j) {
      pw *= v;
      cv[static_cast<std::size_t>(d * sys.k + j - 1)] =
          static_cast<std::int64_t>(sys.rows[static_cast<std::size_t>(j - 1)][static_cast<std::size_t>(i)].convert_to<std::int64_t>() * pw);
    }
  }
  return cv;
}

double box_points(const PowerSystem& sys, int dims) {
  return std::pow(static_cast<double>(sys.hi - sys.lo + 1), dims);
}

// Odometer over the coordinates of one half, maintaining the k partial sums.
// Coordinate 0 of the half is the fastest digit.
class HalfWalker {
 public:
  HalfWalker(const PowerSystem& sys, std::vector<int> idx)
      : k_(sys.k), width_(sys.hi - sys.lo + 1), lo_(sys.lo), idx_(std::move(idx)) {
    for (int i : idx_) cv_.push_back(contributions(sys, i));
    digits_.assign(idx_.size(), 0);
    sums_.assign(static_cast<std::size_t>(k_), 0);
    size_ = 1;
    for (std::size_t p = 0; p < idx_.size(); ++p) size_ *= static_cast<std::uint64_t>(width_);
  }

  std::uint64_t size() const noexcept { return size_; }
  const std::vector<std::int64_t>& sums() const noexcept { return sums_; }
  const std::vector<int>& indices() const noexcept { return idx_; }

  void seek(std::uint64_t t) {
    std::fill(sums_.begin(), sums_.end(), 0);
    for (std::size_t p = 0; p < idx_.size(); ++p) {
      digits_[p] = static_cast<std::int64_t>(t % static_cast<std::uint64_t>(width_));
      t /= static_cast<std::uint64_t>(width_);
      const auto* c = &cv_[p][static_cast<std::size_t>(digits_[p] * k_)];
      for (int j = 0; j < k_; ++j) sums_[static_cast<std::size_t>(j)] += c[j];
    }
  }

  void next() {
    for (std::size_t p = 0; p < idx_.size(); ++p) {
      const auto& cv = cv_[p];
      auto d = digits_[p];
      if (d + 1 < width_) {
        const auto* a = &cv[static_cast<std::size_t>(d * k_)];
        const auto* b = a + k_;
        for (int j = 0; j < k_; ++j) sums_[static_cast<std::size_t>(j)] += b[j] - a[j];
        digits_[p] = d + 1;
        return;
      }
      const auto* a = &cv[static_cast<std::size_t>(d * k_)];
      const auto* b = &cv[0];
      for (int j = 0; j < k_; ++j) sums_[static_cast<std::size_t>(j)] += b[j] - a[j];
      digits_[p] = 0;
    }
  }

  // Coordinate values of the current tuple.
  void values(std::vector<std::int64_t>& out) const {
    out.resize(idx_.size());
    for (std::size_t p = 0; p < idx_.size(); ++p) out[p] = lo_ + digits_[p];
  }

 private:
  int k_;
  std::int64_t width_;
  std::int64_t lo_;
  std::vector<int> idx_;
  std::vector<std::vector<std::int64_t>> cv_;
  std::vector<std::int64_t> digits_;
  std::vector<std::int64_t> sums_;
  std::uint64_t size_ = 1;
};

// Mixed-radix packing of a bounded k-vector into 64 bits.
struct Packer {
  std::vector<std::int64_t> offset;
  std::vector<std::uint64_t> stride;

  std::uint64_t pack(const std::vector<std::int64_t>& f, bool negate) const {
    std::uint64_t key = 0;
    for (std::size_t j = 0; j < offset.size(); ++j) {
      const std::int64_t v = negate ? -f[j] : f[j];
      key += static_cast<std::uint64_t>(v + offset[j]) * stride[j];
    }
    return key;
  }
};

std::optional<Packer> make_packer(const std::vector<BigInt>& bl, const std::vector<BigInt>& br) {
  Packer p;
  BigInt product = 1;
  const BigInt lim = BigInt(1) << 63;
  for (std::size_t j = 0; j < bl.size(); ++j) {
    BigInt h = std::max(bl[j], br[j]);
    if (h >= (BigInt(1) << 62)) return std::nullopt;
    p.offset.push_back(h.convert_to<std::int64_t>());
    p.stride.push_back(product.convert_to<std::uint64_t>());
    product *= 2 * h + 1;
    if (product >= lim) return std::nullopt;
  }
  return p;
}

std::uint64_t next_pow2(std::uint64_t v) {
  std::uint64_t p = 1;
  while (p < v) p <<= 1;
  return p;
}

// Open-addressing multiplicity table keyed by packed 64-bit keys.
class FlatCountTable {
 public:
  explicit FlatCountTable(std::uint64_t capacity)
      : keys_(capacity, kEmpty), counts_(capacity, 0), mask_(capacity - 1) {}

  void add(std::uint64_t key) {
    std::uint64_t h = splitmix64(key) & mask_;
    while (keys_[h] != kEmpty && keys_[h] != key) h = (h + 1) & mask_;
    keys_[h] = key;
    ++counts_[h];
  }

  std::uint64_t find(std::uint64_t key) const {
    std::uint64_t h = splitmix64(key) & mask_;
    while (keys_[h] != kEmpty) {
      if (keys_[h] == key) return counts_[h];
      h = (h + 1) & mask_;
    }
    return 0;
  }

 private:
  std::vector<std::uint64_t> keys_;
  std::vector<std::uint64_t> counts_;
  std::uint64_t mask_;
};

struct Split {
  std::vector<int> build, probe;
};

Split choose_split(int s, const CountOptions& opt) {
  std::vector<int> left, right;
  if (opt.left) {
    std::vector<bool> seen(static_cast<std::size_t>(s), false);
    for (int i : *opt.left) {
      if (i < 0 || i >= s || seen[static_cast<std::size_t>(i)]) throw InvalidInput("invalid index partition");
      seen[static_cast<std::size_t>(i)] = true;
      left.push_back(i);
    }
    for (int i = 0; i < s; ++i)
      if (!seen[static_cast<std::size_t>(i)]) right.push_back(i);
  } else {
    for (int i = 0; i < s; ++i) (i < s / 2 ? right : left).push_back(i);
  }
  // The smaller side is materialised.
  if (left.size() < right.size()) return {left, right};
  return {right, left};
}

// Sum of per-block u128 partials, in block order.
BigInt reduce_blocks(const std::vector<u128>& parts) {
  BigInt total = 0;
  for (auto v : parts) {
    BigInt b = static_cast<std::uint64_t>(v >> 64);
    b <<= 64;
    b += static_cast<std::uint64_t>(v);
    total += b;
  }
  return total;
}

// ---- hash join -----------------------------------------------------------

BigInt hash_join(const PowerSystem& sys, const Split& split, const Packer& packer,
                 std::uint64_t capacity, unsigned threads) {
  FlatCountTable table(capacity);
  {
    HalfWalker w(sys, split.build);
    w.seek(0);
    for (std::uint64_t t = 0; t < w.size(); ++t, w.next()) table.add(packer.pack(w.sums(), true));
  }
  HalfWalker proto(sys, split.probe);
  const std::uint64_t n = proto.size();
  const std::size_t blocks = static_cast<std::size_t>(std::min<std::uint64_t>(kBlocks, n));
  std::vector<u128> parts(blocks, 0);
  parallel_blocks(blocks, threads, [&](std::size_t b) {
    const std::uint64_t begin = n * b / blocks, end = n * (b + 1) / blocks;
    HalfWalker w(sys, split.probe);
    w.seek(begin);
    u128 acc = 0;
    for (std::uint64_t t = begin; t < end; ++t, w.next()) acc += table.find(packer.pack(w.sums(), false));
    parts[b] = acc;
  });
  return reduce_blocks(parts);
}

// ---- streaming sorted join ----------------------------------------------

struct KeyCount {
  std::uint64_t key;
  std::uint64_t count;
};

// Sorted (key, multiplicity) runs for one half; runs beyond the first are
// written to disk when the half does not fit in one chunk.
class SortedRuns {
 public:
  SortedRuns(const PowerSystem& sys, const std::vector<int>& idx, const Packer& packer, bool negate,
             std::uint64_t chunk, const std::filesystem::path& dir, const std::string& tag) {
    HalfWalker w(sys, idx);
    w.seek(0);
    std::vector<std::uint64_t> buf;
    buf.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(chunk, w.size())));
    const bool spill = w.size() > chunk;
    for (std::uint64_t t = 0; t < w.size(); ++t, w.next()) {
      buf.push_back(packer.pack(w.sums(), negate));
      if (buf.size() == chunk) flush(buf, spill, dir, tag);
    }
    if (!buf.empty()) flush(buf, spill, dir, tag);
  }

  ~SortedRuns() {
    for (const auto& f : files_) {
      std::error_code ec;
      std::filesystem::remove(f, ec);
    }
  }
  SortedRuns(const SortedRuns&) = delete;
  SortedRuns& operator=(const SortedRuns&) = delete;

  bool spilled() const noexcept { return !files_.empty(); }

  // Merged stream of aggregated (key, count) in ascending key order.
  class Stream {
   public:
    explicit Stream(const SortedRuns& runs) {
      for (const auto& f : runs.files_) readers_.push_back(std::make_unique<Reader>(f));
      memory_ = &runs.memory_;
      for (std::size_t r = 0; r < readers_.size(); ++r) push(r);
      if (!memory_->empty()) heap_.push({(*memory_)[0].key, kMemory});
    }

    bool next(KeyCount& out) {
      if (heap_.empty()) return false;
      out = {heap_.top().key, 0};
      while (!heap_.empty() && heap_.top().key == out.key) {
        auto src = heap_.top().src;
        heap_.pop();
        if (src == kMemory) {
          out.count += (*memory_)[mem_pos_].count;
          if (++mem_pos_ < memory_->size()) heap_.push({(*memory_)[mem_pos_].key, kMemory});
        } else {
          out.count += readers_[src]->current().count;
          readers_[src]->advance();
          push(src);
        }
      }
      return true;
    }

   private:
    static constexpr std::size_t kMemory = ~std::size_t{0};
    struct Reader {
      explicit Reader(const std::filesystem::path& p) : in(p, std::ios::binary) { refill(); }
      void refill() {
        buf.resize(1 << 15);
        in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size() * sizeof(KeyCount)));
        buf.resize(static_cast<std::size_t>(in.gcount()) / sizeof(KeyCount));
        pos = 0;
      }
      bool valid() const { return pos < buf.size(); }
      const KeyCount& current() const { return buf[pos]; }
      void advance() {
        if (++pos == buf.size()) refill();
      }
      std::ifstream in;
      std::vector<KeyCount> buf;
      std::size_t pos = 0;
    };
    struct Head {
      std::uint64_t key;
      std::size_t src;
      bool operator>(const Head& o) const { return key > o.key || (key == o.key && src > o.src); }
    };
    void push(std::size_t r) {
      if (readers_[r]->valid()) heap_.push({readers_[r]->current().key, r});
    }
    std::vector<std::unique_ptr<Reader>> readers_;
    const std::vector<KeyCount>* memory_ = nullptr;
    std::size_t mem_pos_ = 0;
    std::priority_queue<Head, std::vector<Head>, std::greater<Head>> heap_;
  };

 private:
  void flush(std::vector<std::uint64_t>& buf, bool spill, const std::filesystem::path& dir,
             const std::string& tag) {
    std::sort(buf.begin(), buf.end());
    std::vector<KeyCount> run;
    for (std::size_t a = 0; a < buf.size();) {
      std::size_t b = a;
      while (b < buf.size() && buf[b] == buf[a]) ++b;
      run.push_back({buf[a], static_cast<std::uint64_t>(b - a)});
      a = b;
    }
    buf.clear();
    if (!spill) {
      memory_ = std::move(run);
      return;
    }
    auto path = dir / ("diagline-" + tag + "-" + std::to_string(files_.size()) + "-" +
                       hex64(splitmix64(reinterpret_cast<std::uintptr_t>(this))) + ".run");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write spill file " + path.string());
    out.write(reinterpret_cast<const char*>(run.data()), static_cast<std::streamsize>(run.size() * sizeof(KeyCount)));
    if (!out) throw std::runtime_error("short write to spill file " + path.string());
    files_.push_back(path);
  }

  std::vector<KeyCount> memory_;
  std::vector<std::filesystem::path> files_;
};

BigInt sorted_join(const PowerSystem& sys, const Split& split, const Packer& packer, std::uint64_t budget,
                   const std::filesystem::path& dir, bool& spilled) {
  const std::uint64_t chunk = std::max<std::uint64_t>(budget / (2 * (sizeof(std::uint64_t) + sizeof(KeyCount))), 1024);
  SortedRuns build(sys, split.build, packer, true, chunk, dir, "b");
  SortedRuns probe(sys, split.probe, packer, false, chunk, dir, "p");
  spilled = build.spilled() || probe.spilled();
  SortedRuns::Stream a(build), b(probe);
  KeyCount x{}, y{};
  bool ha = a.next(x), hb = b.next(y);
  BigInt total = 0;
  u128 acc = 0;
  while (ha && hb) {
    if (x.key < y.key) {
      ha = a.next(x);
    } else if (y.key < x.key) {
      hb = b.next(y);
    } else {
      acc += static_cast<u128>(x.count) * y.count;
      if (acc >> 120) {
        total += BigInt(static_cast<std::uint64_t>(acc >> 64)) * (BigInt(1) << 64) + static_cast<std::uint64_t>(acc);
        acc = 0;
      }
      ha = a.next(x);
      hb = b.next(y);
    }
  }
  return total + reduce_blocks({acc});
}

// ---- arbitrary precision keys --------------------------------------------

std::vector<BigInt> big_sums(const PowerSystem& sys, const std::vector<int>& idx,
                             const std::vector<std::int64_t>& vals) {
  std::vector<BigInt> f(static_cast<std::size_t>(sys.k), BigInt(0));
  for (std::size_t p = 0; p < idx.size(); ++p) {
    BigInt pw = 1;
    for (int j = 1; j <= sys.k; ++j) {
      pw *= vals[p];
      f[static_cast<std::size_t>(j - 1)] += sys.rows[static_cast<std::size_t>(j - 1)][static_cast<std::size_t>(idx[p])] * pw;
    }
  }
  return f;
}

// Odometer over plain values, for the big-key and naive-big paths.
bool advance(std::vector<std::int64_t>& vals, std::int64_t lo, std::int64_t hi) {
  for (auto& v : vals) {
    if (v < hi) {
      ++v;
      return true;
    }
    v = lo;
  }
  return false;
}

BigInt big_join(const PowerSystem& sys, const Split& split) {
  std::map<std::vector<BigInt>, std::uint64_t> table;
  std::vector<std::int64_t> vals(split.build.size(), sys.lo);
  do {
    auto f = big_sums(sys, split.build, vals);
    for (auto& v : f) v = -v;
    ++table[f];
  } while (advance(vals, sys.lo, sys.hi));
  BigInt total = 0;
  vals.assign(split.probe.size(), sys.lo);
  do {
    auto it = table.find(big_sums(sys, split.probe, vals));
    if (it != table.end()) total += it->second;
  } while (advance(vals, sys.lo, sys.hi));
  return total;
}

std::vector<int> iota_indices(int s) {
  std::vector<int> v(static_cast<std::size_t>(s));
  std::iota(v.begin(), v.end(), 0);
  return v;
}

}  // namespace

PowerSystem line_power_system(const LineSystem& ls, std::int64_t box) {
  if (box < 0) throw InvalidInput("box bound B must be >= 0");
  PowerSystem sys;
  sys.k = ls.k();
  sys.rows = ls.rows();
  sys.lo = -box;
  sys.hi = box;
  return sys;
}

CountResult count_power_system_naive(const PowerSystem& sys, const CountOptions& opt) {
  validate(sys);
  const auto t0 = Clock::now();
  const double points = box_points(sys, sys.s());
  if (points > opt.eval_budget)
    throw BudgetExceeded("naive count needs " + format_double(points) + " evaluations; budget is " +
                             format_double(opt.eval_budget),
                         points, opt.eval_budget);
  CountResult res;
  res.method = CountMethod::naive;
  const auto all = iota_indices(sys.s());
  if (bounds_fit_i64(partial_bounds(sys, all))) {
    HalfWalker proto(sys, all);
    const std::uint64_t n = proto.size();
    const std::size_t blocks = static_cast<std::size_t>(std::min<std::uint64_t>(kBlocks, n));
    std::vector<u128> parts(blocks, 0);
    parallel_blocks(blocks, opt.threads, [&](std::size_t b) {
      const std::uint64_t begin = n * b / blocks, end = n * (b + 1) / blocks;
      HalfWalker w(sys, all);
      w.seek(begin);
      u128 acc = 0;
      for (std::uint64_t t = begin; t < end; ++t, w.next()) {
        bool zero = true;
        for (auto v : w.sums()) zero = zero && v == 0;
        acc += zero;
      }
      parts[b] = acc;
    });
    res.count = reduce_blocks(parts);
  } else {
    std::vector<std::int64_t> vals(static_cast<std::size_t>(sys.s()), sys.lo);
    BigInt total = 0;
    do {
      bool zero = true;
      for (const auto& v : big_sums(sys, all, vals)) zero = zero && v == 0;
      if (zero) ++total;
    } while (advance(vals, sys.lo, sys.hi));
    res.count = total;
  }
  res.wall_time = seconds_since(t0);
  res.instance_digest = power_system_digest(sys);
  return res;
}

CountResult count_power_system_mitm(const PowerSystem& sys, const CountOptions& opt) {
  validate(sys);
  const auto t0 = Clock::now();
  const Split split = choose_split(sys.s(), opt);
  const double build_n = box_points(sys, static_cast<int>(split.build.size()));
  const double probe_n = box_points(sys, static_cast<int>(split.probe.size()));
  if (probe_n > 1.8e19 || build_n > 1.8e19)
    throw BudgetExceeded("half-tuple count exceeds 64-bit enumeration range", std::max(build_n, probe_n), 1.8e19);

  CountResult res;
  res.method = CountMethod::mitm;
  const auto bb = partial_bounds(sys, split.build);
  const auto bp = partial_bounds(sys, split.probe);
  std::optional<Packer> packer;
  if (opt.keys != KeyMode::big && bounds_fit_i64(bb) && bounds_fit_i64(bp)) packer = make_packer(bb, bp);
  if (opt.keys == KeyMode::packed && !packer)
    throw InvalidInput("packed keys requested but the value bound does not fit 64 bits");

  if (!packer) {
    const double bytes = build_n * 64.0 * sys.k;
    if (bytes > static_cast<double>(opt.memory_budget))
      throw BudgetExceeded("big-key join needs about " + format_double(bytes) + " bytes", bytes,
                           static_cast<double>(opt.memory_budget));
    res.count = big_join(sys, split);
    res.join = "big";
  } else {
    // Distinct build keys are bounded by both the tuple count and the key space.
    double key_space = 1.0;
    for (std::size_t j = 0; j < packer->offset.size(); ++j) key_space *= 2.0 * static_cast<double>(packer->offset[j]) + 1.0;
    const double distinct = std::min(build_n, key_space);
    const std::uint64_t capacity = next_pow2(static_cast<std::uint64_t>(distinct * 2.0) + 2);
    const double hash_bytes = static_cast<double>(capacity) * 16.0;
    bool use_hash = opt.join == JoinMode::hash ||
                    (opt.join == JoinMode::automatic && hash_bytes <= static_cast<double>(opt.memory_budget));
    if (opt.join == JoinMode::hash && hash_bytes > static_cast<double>(opt.memory_budget))
      throw BudgetExceeded("hash table needs " + format_double(hash_bytes) + " bytes; budget is " +
                               std::to_string(opt.memory_budget),
                           hash_bytes, static_cast<double>(opt.memory_budget));
    if (use_hash) {
      res.count = hash_join(sys, split, *packer, capacity, opt.threads);
      res.join = "hash";
    } else {
      bool spilled = false;
      auto dir = opt.spill_dir.empty() ? std::filesystem::temp_directory_path() : opt.spill_dir;
      res.count = sorted_join(sys, split, *packer, opt.memory_budget, dir, spilled);
      res.join = spilled ? "sorted-spilled" : "sorted";
    }
  }
  res.wall_time = seconds_since(t0);
  res.instance_digest = power_system_digest(sys);
  return res;
}

CountResult count_lines_naive(const LineSystem& ls, std::int64_t box, const CountOptions& opt) {
  auto res = count_power_system_naive(line_power_system(ls, box), opt);
  res.box = box;
  res.instance_digest = ls.digest();
  return res;
}

CountResult count_lines_mitm(const LineSystem& ls, std::int64_t box, const CountOptions& opt) {
  auto res = count_power_system_mitm(line_power_system(ls, box), opt);
  res.box = box;
  res.instance_digest = ls.digest();
  return res;
}

CountResult count_lines(const LineSystem& ls, std::int64_t box, const CountOptions& opt) {
  if (box < 0) throw InvalidInput("box bound B must be >= 0");
  const double points = std::pow(2.0 * static_cast<double>(box) + 1.0, ls.s());
  return points <= 1e6 ? count_lines_naive(ls, box, opt) : count_lines_mitm(ls, box, opt);
}

std::vector<std::vector<std::int64_t>> enumerate_line_solutions(const LineSystem& ls, std::int64_t box,
                                                                std::size_t limit, const CountOptions& opt) {
  const PowerSystem sys = line_power_system(ls, box);
  validate(sys);
  const Split split = choose_split(sys.s(), opt);
  const auto bb = partial_bounds(sys, split.build);
  const auto bp = partial_bounds(sys, split.probe);
  std::optional<Packer> packer;
  if (bounds_fit_i64(bb) && bounds_fit_i64(bp)) packer = make_packer(bb, bp);
  if (!packer) throw InvalidInput("solution listing needs 64-bit packable keys");
  const double build_n = box_points(sys, static_cast<int>(split.build.size()));
  const double bytes = build_n * 48.0;
  if (bytes > static_cast<double>(opt.memory_budget))
    throw BudgetExceeded("solution listing index needs about " + format_double(bytes) + " bytes", bytes,
                         static_cast<double>(opt.memory_budget));

  std::unordered_map<std::uint64_t, std::vector<std::uint64_t>> index;
  HalfWalker wb(sys, split.build);
  wb.seek(0);
  for (std::uint64_t t = 0; t < wb.size(); ++t, wb.next()) index[packer->pack(wb.sums(), true)].push_back(t);

  std::vector<std::vector<std::int64_t>> out;
  HalfWalker wp(sys, split.probe);
  wp.seek(0);
  std::vector<std::int64_t> pv, bv, z(static_cast<std::size_t>(sys.s()));
  for (std::uint64_t t = 0; t < wp.size(); ++t, wp.next()) {
    auto it = index.find(packer->pack(wp.sums(), false));
    if (it == index.end()) continue;
    wp.values(pv);
    for (std::size_t p = 0; p < pv.size(); ++p) z[static_cast<std::size_t>(split.probe[p])] = pv[p];
    for (auto bt : it->second) {
      wb.seek(bt);
      wb.values(bv);
      for (std::size_t p = 0; p < bv.size(); ++p) z[static_cast<std::size_t>(split.build[p])] = bv[p];
      out.push_back(z);
    }
    if (out.size() > 4 * limit + 1024) {
      std::sort(out.begin(), out.end());
      out.resize(std::min(out.size(), limit));
    }
  }
  std::sort(out.begin(), out.end());
  if (out.size() > limit) out.resize(limit);
  return out;
}

namespace {

PowerSystem translation_power_system(std::span<const std::int64_t> c, int k, std::int64_t lo, std::int64_t hi) {
  if (k < 1) throw InvalidInput("k must be >= 1");
  if (c.empty()) throw InvalidInput("need at least one coefficient");
  for (auto ci : c)
    if (ci == 0) throw InvalidInput("coefficients must be nonzero");
  PowerSystem sys;
  sys.k = k;
  sys.lo = lo;
  sys.hi = hi;
  sys.rows.assign(static_cast<std::size_t>(k), {});
  for (auto& row : sys.rows)
    for (auto ci : c) row.emplace_back(ci);
  return sys;
}

CountResult count_auto(const PowerSystem& sys, const CountOptions& opt) {
  return box_points(sys, sys.s()) <= 1e6 ? count_power_system_naive(sys, opt)
                                         : count_power_system_mitm(sys, opt);
}

}  // namespace

CountResult count_translation_system(std::span<const std::int64_t> c, int k, std::int64_t X,
                                     const CountOptions& opt) {
  if (X < 0) throw InvalidInput("X must be >= 0");
  auto res = count_auto(translation_power_system(c, k, -X, X), opt);
  res.box = X;
  return res;
}

AveragingReport verify_averaging_inequality(std::span<const std::int64_t> c, int k, std::int64_t X,
                                            const CountOptions& opt) {
  if (X < 1) throw InvalidInput("X must be >= 1");
  BigInt sum = 0;
  for (auto ci : c) sum += ci;
  if (sum == 0) throw InvalidInput("sum of coefficients is zero, so c0 = 0");
  if (!fits_i64(sum)) throw InvalidInput("coefficient sum exceeds 64 bits");
  AveragingReport rep;
  rep.X = X;
  rep.lhs = count_translation_system(c, k, X, opt).count;
  std::vector<std::int64_t> ext;
  ext.push_back(-sum.convert_to<std::int64_t>());
  ext.insert(ext.end(), c.begin(), c.end());
  rep.shifted_count = count_auto(translation_power_system(ext, k, -2 * X, 2 * X), opt).count;
  rep.rhs = rep.shifted_count.convert_to<double>() / static_cast<double>(X);
  rep.holds = rep.lhs * X <= rep.shifted_count;
  return rep;
}

CountResult count_vinogradov(int t, int k, std::int64_t lo, std::int64_t hi, const CountOptions& opt) {
  if (t < 1) throw InvalidInput("t must be >= 1");
  if (lo > hi) throw InvalidInput("empty range");
  std::vector<std::int64_t> c(static_cast<std::size_t>(t), 1);
  c.insert(c.end(), static_cast<std::size_t>(t), -1);
  CountOptions o = opt;
  if (!o.left) {
    std::vector<int> left(static_cast<std::size_t>(t));
    std::iota(left.begin(), left.end(), 0);
    o.left = left;
  }
  auto res = count_power_system_mitm(translation_power_system(c, k, lo, hi), o);
  res.box = hi;
  return res;
}

GrowthFit fit_growth_exponent(std::span<const std::pair<double, double>> points) {
  if (points.size() < 3) throw InvalidInput("growth fit needs at least 3 points");
  std::vector<double> xs, ys;
  for (const auto& [box, count] : points) {
    if (!(count > 0)) throw InvalidInput("growth fit needs positive counts");
    if (!(box > 0)) throw InvalidInput("growth fit needs positive boxes");
    xs.push_back(std::log(box));
    ys.push_back(std::log(count));
  }
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (sxx == 0) throw InvalidInput("growth fit needs distinct boxes");
  GrowthFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (fit.intercept + fit.slope * xs[i]);
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / n);
  return fit;
}

}  // namespace diagline
