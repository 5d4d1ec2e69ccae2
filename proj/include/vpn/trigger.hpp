#pragma once

#include <vector>

#include "vpn/model.hpp"

namespace vpn {

// Axis-aligned square patch occupying all image channels.
struct TriggerRegion {
  int row = 0;
  int col = 0;
  int size = 1;

  bool operator==(const TriggerRegion&) const = default;
};

// Pixel values for a region, row-major channel-last within the patch;
// length size*size*channels, every value in [0,1].
struct TriggerAssignment {
  std::vector<double> values;
};

class trigger_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// All in-bounds positions with row and col multiples of stride, row-major.
std::vector<TriggerRegion> enumerate_regions(const Shape& shape, int size, int stride = 1);

// Flat image indices covered by the region, in assignment order.
std::vector<int> region_flat_indices(const Shape& shape, const TriggerRegion& region);

void check_trigger_fits(const Shape& shape, const TriggerRegion& region,
                        const TriggerAssignment& assignment);

// Returns a copy with the patch overwritten; the input is not touched.
Image apply_trigger(const Image& image, const TriggerRegion& region,
                    const TriggerAssignment& assignment);

// Rounds values to multiples of 1/255 (8-bit image grid).
TriggerAssignment quantize_assignment(const TriggerAssignment& assignment);

}  // namespace vpn
