#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "vpn/model.hpp"

namespace vpn {

class data_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Dataset {
  Shape shape;
  std::vector<Image> images;
  std::vector<int> labels;

  size_t size() const { return images.size(); }
};

struct SuiteMember {
  Image image;
  int label = 0;         // ground truth; equals the prediction at selection time
  int source_index = 0;  // index into the dataset the suite was built from
};

struct TestSuite {
  std::vector<SuiteMember> members;
  bool diversity_warning = false;  // one class covers nearly the whole suite

  int size() const { return static_cast<int>(members.size()); }
};

// IDX ingestion (see data-format.md). Magic 0x00000803 for 1-channel
// images, 0x00000804 with an extra channel dimension, 0x00000801 for
// labels; big-endian counts; optionally gzip-compressed (0x1f8b prefix).
// Pixels are scaled by 1/255.
Dataset load_idx(std::istream& images_source, std::istream& labels_source);
Dataset load_idx_files(const std::string& images_path, const std::string& labels_path);

// Mirror writer; save then load is byte-identity on valid files.
void save_idx(const Dataset& data, std::ostream& images_out, std::ostream& labels_out);
void save_idx_files(const Dataset& data, const std::string& images_path,
                    const std::string& labels_path);

// CSV rows: label, then H*W*C integers 0..255, row-major channel-last.
Dataset load_csv(std::istream& source, const Shape& shape);
Dataset load_csv_file(const std::string& path, const Shape& shape);

// Up to n correctly classified members, deterministic for a fixed seed.
// With stratify, per-class counts differ by at most one where availability
// permits. Members come out sorted by source index. k_hint feeds the
// diversity warning: a warning is raised when any single predicted class
// covers >= n - k_hint members.
TestSuite select_test_suite(const Network& net, const Dataset& data, int n, uint64_t seed,
                            bool stratify = true, int k_hint = 0, int threads = 1);

}  // namespace vpn
