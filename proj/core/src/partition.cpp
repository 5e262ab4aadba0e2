#include <stdexcept>

#include "bsf/runtime.hpp"

namespace bsf {

DataPartition partition(std::size_t n_items, int workers) {
  if (workers < 1) {
    throw std::invalid_argument("workers must be >= 1");
  }
  const std::size_t k = static_cast<std::size_t>(workers);
  const std::size_t base = n_items / k;
  const std::size_t extra = n_items % k;

  DataPartition part;
  part.n_items = n_items;
  part.workers = workers;
  part.slices.reserve(k);
  std::size_t offset = 0;
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t length = base + (i < extra ? 1 : 0);
    part.slices.push_back(Slice{offset, length});
    offset += length;
  }
  return part;
}

}  // namespace bsf
