#ifndef PPOCR_DATAKIT_FONT_HPP_
#define PPOCR_DATAKIT_FONT_HPP_

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ppocr/datakit/image.hpp"
#include "ppocr/losses/seq_label.hpp"

namespace ppocr {

inline constexpr int kGlyphWidth = 5;
inline constexpr int kGlyphHeight = 7;
inline constexpr int kGlyphPitch = 6;  // glyph plus one blank column

// 5x7 bitmap glyph for digits and upper-case letters; rows top to bottom,
// bit 4 is the leftmost column.
std::optional<std::array<std::uint8_t, kGlyphHeight>> glyph_rows(char c);
bool has_glyph(char c);

// Pixel width of `text` rendered at glyph pitch (no trailing gap).
int text_width(std::string_view text);

// Draws `text` with its top-left corner at (x, y); pixels outside the image
// are dropped. Sets every channel of ink pixels to `ink`.
void draw_text(Image& image, int x, int y, std::string_view text, std::uint8_t ink);

// Ordered symbol set; class index of symbols[i] is i + 1, index 0 is the
// CTC blank. Every symbol is a single character with a glyph.
class Charset {
 public:
  Charset() = default;
  explicit Charset(std::vector<char> symbols);
  static Charset digits();
  static Charset alphanumeric();
  // Parses "0-9", "A-Z" style ranges and literal characters.
  static Charset from_spec(std::string_view spec);

  const std::vector<char>& symbols() const { return symbols_; }
  std::size_t size() const { return symbols_.size(); }
  bool empty() const { return symbols_.empty(); }
  // Number of classes including the blank.
  int num_classes() const { return static_cast<int>(symbols_.size()) + 1; }

  int index_of(char c) const;  // throws for unknown symbols
  SeqLabel encode(std::string_view text) const;
  std::string decode(const SeqLabel& label) const;

  friend bool operator==(const Charset&, const Charset&) = default;

 private:
  std::vector<char> symbols_;
};

}  // namespace ppocr

#endif  // PPOCR_DATAKIT_FONT_HPP_
