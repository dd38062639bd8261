#ifndef PPOCR_LOSSES_SEQ_LABEL_HPP_
#define PPOCR_LOSSES_SEQ_LABEL_HPP_

#include <vector>

namespace ppocr {

inline constexpr int kBlankIndex = 0;

// Class-index sequence for recognition. Never contains the blank.
struct SeqLabel {
  std::vector<int> symbols;

  std::size_t size() const { return symbols.size(); }
  bool empty() const { return symbols.empty(); }
  friend bool operator==(const SeqLabel&, const SeqLabel&) = default;
};

}  // namespace ppocr

#endif  // PPOCR_LOSSES_SEQ_LABEL_HPP_
