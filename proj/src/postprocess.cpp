#include "isurf/postprocess.h"

#include <algorithm>
#include <cmath>

#include "isurf/kdtree.h"
#include "isurf/rng.h"

namespace isurf {

namespace {

// Indexed binary max-heap with updatable keys; ties broken by index so the
// elimination order is reproducible.
class IndexedMaxHeap {
 public:
  explicit IndexedMaxHeap(const std::vector<Scalar>& keys) : keys_(keys) {
    pos_.assign(keys_.size(), -1);
    heap_.resize(keys_.size());
    for (std::int32_t i = 0; i < static_cast<std::int32_t>(keys_.size()); ++i) heap_[i] = i;
    for (std::int32_t i = static_cast<std::int32_t>(keys_.size()) / 2 - 1; i >= 0; --i) sift_down(i);
    for (std::int32_t i = 0; i < static_cast<std::int32_t>(heap_.size()); ++i)
      pos_[static_cast<size_t>(heap_[static_cast<size_t>(i)])] = i;
  }

  bool empty() const { return heap_.empty(); }
  std::int32_t pop_max() {
    const std::int32_t top = heap_.front();
    swap_slots(0, static_cast<std::int32_t>(heap_.size()) - 1);
    heap_.pop_back();
    pos_[static_cast<size_t>(top)] = -1;
    if (!heap_.empty()) sift_down(0);
    return top;
  }
  void update(std::int32_t idx, Scalar key) {
    keys_[static_cast<size_t>(idx)] = key;
    const std::int32_t slot = pos_[static_cast<size_t>(idx)];
    if (slot < 0) return;
    sift_down(sift_up(slot));
  }

 private:
  bool less(std::int32_t a, std::int32_t b) const {
    const Scalar ka = keys_[static_cast<size_t>(a)], kb = keys_[static_cast<size_t>(b)];
    return ka < kb || (ka == kb && a > b);
  }
  void swap_slots(std::int32_t a, std::int32_t b) {
    std::swap(heap_[static_cast<size_t>(a)], heap_[static_cast<size_t>(b)]);
    pos_[static_cast<size_t>(heap_[static_cast<size_t>(a)])] = a;
    pos_[static_cast<size_t>(heap_[static_cast<size_t>(b)])] = b;
  }
  std::int32_t sift_up(std::int32_t slot) {
    while (slot > 0) {
      const std::int32_t parent = (slot - 1) / 2;
      if (!less(heap_[static_cast<size_t>(parent)], heap_[static_cast<size_t>(slot)])) break;
      swap_slots(parent, slot);
      slot = parent;
    }
    return slot;
  }
  void sift_down(std::int32_t slot) {
    const std::int32_t n = static_cast<std::int32_t>(heap_.size());
    for (;;) {
      std::int32_t largest = slot;
      for (std::int32_t c = 2 * slot + 1; c <= 2 * slot + 2 && c < n; ++c)
        if (less(heap_[static_cast<size_t>(largest)], heap_[static_cast<size_t>(c)])) largest = c;
      if (largest == slot) return;
      swap_slots(slot, largest);
      slot = largest;
    }
  }

  std::vector<Scalar> keys_;
  std::vector<std::int32_t> heap_;
  std::vector<std::int32_t> pos_;
};

}  // namespace

std::vector<SurfaceSample> blue_noise_subsample(const std::vector<SurfaceSample>& samples,
                                                std::int64_t target_count, Scalar surface_area) {
  const std::int64_t n = static_cast<std::int64_t>(samples.size());
  if (target_count > n) throw std::invalid_argument("target count exceeds input size");
  if (target_count == n) return samples;
  if (target_count < 1) throw std::invalid_argument("target count must be >= 1");
  if (!(surface_area > 0)) throw std::invalid_argument("surface area must be positive");

  const Scalar r_max =
      std::sqrt(surface_area / (2.0 * std::sqrt(3.0) * static_cast<Scalar>(target_count)));
  const Scalar d_max = 2.0 * r_max;
  auto pair_weight = [&](Scalar d) {
    const Scalar x = 1.0 - std::min(d, d_max) / d_max;
    const Scalar x2 = x * x;
    return x2 * x2 * x2 * x2;
  };

  std::vector<Vec3> points(samples.size());
  for (size_t i = 0; i < samples.size(); ++i) points[i] = samples[i].point;
  const KdTree3 tree(points);

  std::vector<std::vector<std::int32_t>> neighbors(samples.size());
  std::vector<Scalar> weights(samples.size(), 0);
  std::vector<std::int32_t> found;
  for (std::int32_t i = 0; i < n; ++i) {
    tree.radius_query(points[static_cast<size_t>(i)], d_max, found);
    Scalar w = 0;
    for (std::int32_t j : found) {
      if (j == i) continue;
      neighbors[static_cast<size_t>(i)].push_back(j);
      w += pair_weight((points[static_cast<size_t>(i)] - points[static_cast<size_t>(j)]).norm());
    }
    weights[static_cast<size_t>(i)] = w;
  }

  IndexedMaxHeap heap(weights);
  std::vector<std::uint8_t> alive(samples.size(), 1);
  std::int64_t remaining = n;
  while (remaining > target_count) {
    const std::int32_t victim = heap.pop_max();
    alive[static_cast<size_t>(victim)] = 0;
    --remaining;
    for (std::int32_t j : neighbors[static_cast<size_t>(victim)]) {
      if (!alive[static_cast<size_t>(j)]) continue;
      weights[static_cast<size_t>(j)] -= pair_weight(
          (points[static_cast<size_t>(victim)] - points[static_cast<size_t>(j)]).norm());
      heap.update(j, weights[static_cast<size_t>(j)]);
    }
  }

  std::vector<SurfaceSample> out;
  out.reserve(static_cast<size_t>(target_count));
  for (std::int64_t i = 0; i < n; ++i)
    if (alive[static_cast<size_t>(i)]) out.push_back(samples[static_cast<size_t>(i)]);
  return out;
}

std::vector<SurfaceSample> importance_resample(const std::vector<SurfaceSample>& samples,
                                               const std::vector<Scalar>& weights,
                                               std::int64_t count, std::uint64_t seed) {
  if (weights.size() != samples.size())
    throw std::invalid_argument("weights and samples must align");
  std::vector<Scalar> cdf(weights.size());
  Scalar total = 0;
  for (size_t i = 0; i < weights.size(); ++i) {
    if (!(weights[i] >= 0) || !std::isfinite(weights[i]))
      throw std::invalid_argument("weights must be finite and nonnegative");
    total += weights[i];
    cdf[i] = total;
  }
  if (!(total > 0)) throw std::invalid_argument("at least one weight must be positive");

  std::vector<SurfaceSample> out;
  out.reserve(static_cast<size_t>(count));
  for (std::int64_t d = 0; d < count; ++d) {
    CounterRng rng(seed ^ 0x77726573ull, static_cast<std::uint64_t>(d));
    const Scalar u = rng.next_double() * total;
    const auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
    size_t idx = static_cast<size_t>(it - cdf.begin());
    while (idx < weights.size() && weights[idx] <= 0) ++idx;  // never land on zero weight
    if (idx >= weights.size()) idx = weights.size() - 1;
    out.push_back(samples[idx]);
  }
  return out;
}

std::vector<SurfaceSample> importance_resample(
    const std::vector<SurfaceSample>& samples,
    const std::function<Scalar(const SurfaceSample&)>& weight_fn, std::int64_t count,
    std::uint64_t seed) {
  std::vector<Scalar> weights(samples.size());
  for (size_t i = 0; i < samples.size(); ++i) weights[i] = weight_fn(samples[i]);
  return importance_resample(samples, weights, count, seed);
}

Scalar mean_curvature(const ImplicitField& field, const Vec3& p, Scalar h) {
  (void)gradient(field, p);  // throws DegenerateGradientError off the SDF sweet spot
  const Scalar center = field.evaluate(p);
  Scalar lap = 0;
  for (int a = 0; a < 3; ++a) {
    Vec3 hi = p, lo = p;
    hi[a] += h;
    lo[a] -= h;
    lap += field.evaluate(hi) + field.evaluate(lo);
  }
  lap = (lap - 6.0 * center) / (h * h);
  return 0.5 * lap;
}

}  // namespace isurf
