#pragma once

#include <fstream>
#include <string>
#include <vector>

#include "portlab/errors.hpp"
#include "portlab/portfolio/math.hpp"
#include "portlab/util.hpp"

namespace portlab::train {

// one stored portfolio vector per period, cash slot first. rows start
// uniform so an untrained read is already a valid portfolio.
class Pvm {
 public:
  Pvm(int rows, int m) : rows_(rows), width_(m + 1) {
    if (rows < 1) throw validation_error("pvm: need at least one row");
    if (m < 1) throw validation_error("pvm: need at least one non-cash asset");
    data_.assign(size_t(rows_) * size_t(width_), 1.0 / double(width_));
  }

  int rows() const { return rows_; }
  int width() const { return width_; }  // m + 1

  portfolio::Weights read(int t) const {
    check_row(t);
    auto it = data_.begin() + size_t(t) * size_t(width_);
    return portfolio::Weights(it, it + width_);
  }

  void write(int t, const portfolio::Weights& w) {
    check_row(t);
    if (int(w.size()) != width_)
      throw validation_error("pvm: row has " + std::to_string(width_) + " slots, got " +
                             std::to_string(w.size()));
    portfolio::validate_simplex(w, "pvm: write");
    std::copy(w.begin(), w.end(), data_.begin() + size_t(t) * size_t(width_));
    if (t > max_written_) max_written_ = t;
  }

  // highest row ever written; -1 while the memory is untouched
  int max_written() const { return max_written_; }

  void save(const std::string& path) const {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw io_error("cannot write " + path);
    os.write("PLPVM1\n", 7);
    write_u64_le(os, uint64_t(rows_));
    write_u64_le(os, uint64_t(width_));
    for (double v : data_) write_f64_le(os, v);
    if (!os) throw io_error("short write to " + path);
  }

  static Pvm load(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw io_error("cannot read " + path);
    char magic[7];
    is.read(magic, 7);
    if (!is || std::string_view(magic, 7) != "PLPVM1\n")
      throw parse_error("not a portfolio memory file: " + path);
    try {
      uint64_t rows = read_u64_le(is);
      uint64_t width = read_u64_le(is);
      if (rows < 1 || width < 2 || rows > (1u << 28) || width > (1u << 20))
        throw parse_error("portfolio memory header is corrupt: " + path);
      Pvm p(int(rows), int(width) - 1);
      for (auto& v : p.data_) v = read_f64_le(is);
      return p;
    } catch (const io_error&) {
      throw parse_error("portfolio memory file is truncated: " + path);
    }
  }

 private:
  void check_row(int t) const {
    if (t < 0 || t >= rows_)
      throw range_error("pvm: row " + std::to_string(t) + " outside [0," + std::to_string(rows_) + ")");
  }

  int rows_, width_;
  int max_written_ = -1;
  std::vector<double> data_;
};

}  // namespace portlab::train
