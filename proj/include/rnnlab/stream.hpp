#pragma once

// Labeled input/target streams and the lane/window slicing used by
// truncated BPTT.

#include "rnnlab/alphabet.hpp"

#include <stdexcept>
#include <vector>

namespace rnnlab {

// Aligned input/target streams over declared alphabets.
struct LabeledStream {
  Alphabet input_alphabet;
  Alphabet target_alphabet;
  std::vector<int> input;   // ids into input_alphabet
  std::vector<int> target;  // ids into target_alphabet

  size_t size() const { return input.size(); }

  void validate() const {
    if (input.size() != target.size())
      throw std::invalid_argument("stream: input/target length mismatch");
    for (int id : input)
      if (id < 0 || id >= input_alphabet.size())
        throw std::invalid_argument("stream: input id out of range");
    for (int id : target)
      if (id < 0 || id >= target_alphabet.size())
        throw std::invalid_argument("stream: target id out of range");
  }
};

// Slicing of a stream into batch_size contiguous lanes, each lane split
// into windows of unfold_len steps. Hidden state is carried across
// consecutive windows of the same lane; the tail that does not fill the
// lane x window grid is dropped.
struct BatchPlan {
  int batch_size = 0;
  int unfold_len = 0;
  int lane_len = 0;   // multiple of unfold_len
  int n_windows = 0;  // lane_len / unfold_len

  // global stream position of (lane, window, step)
  int pos(int lane, int window, int step) const {
    return lane * lane_len + window * unfold_len + step;
  }
  int covered() const { return batch_size * lane_len; }
};

inline BatchPlan plan_batches(size_t stream_len, int batch_size,
                              int unfold_len) {
  if (batch_size < 1 || unfold_len < 1)
    throw std::invalid_argument("plan_batches: bad batch/unfold");
  if (stream_len < static_cast<size_t>(batch_size) * unfold_len)
    throw std::invalid_argument("plan_batches: stream too short");
  BatchPlan p;
  p.batch_size = batch_size;
  p.unfold_len = unfold_len;
  p.n_windows =
      static_cast<int>(stream_len / (static_cast<size_t>(batch_size) * unfold_len));
  p.lane_len = p.n_windows * unfold_len;
  return p;
}

inline BatchPlan plan_batches(const LabeledStream& s, int batch_size,
                              int unfold_len) {
  return plan_batches(s.size(), batch_size, unfold_len);
}

}  // namespace rnnlab
