#pragma once

#include <cstddef>
#include <cstring>
#include <vector>

namespace parisian::detail {

// Minimum over every length-(w+1) window of a contiguous array, monotone-deque
// algorithm, O(n) total.  Reusable scratch to avoid per-path allocation.
class SlidingMin {
  public:
    // out[i] = min(v[i], ..., v[i+w]) for i in [0, n-w); out needs n-w slots.
    void run(const double* v, std::size_t n, std::size_t w, double* out) {
        if (n == 0 || w >= n) return;
        if (w == 0) {
            std::memcpy(out, v, n * sizeof(double));
            return;
        }
        ring_.resize(n);
        std::size_t head = 0, tail = 0;  // ring_[head..tail) holds candidate indices
        for (std::size_t j = 0; j < n; ++j) {
            while (tail > head && v[ring_[tail - 1]] >= v[j]) --tail;
            ring_[tail++] = j;
            if (ring_[head] + w + 1 <= j) ++head;
            if (j >= w) out[j - w] = v[ring_[head]];
        }
    }

  private:
    std::vector<std::size_t> ring_;
};

}  // namespace parisian::detail
