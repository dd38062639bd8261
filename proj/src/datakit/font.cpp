#include "ppocr/datakit/font.hpp"

#include <algorithm>
#include <stdexcept>

namespace ppocr {

namespace {

using Rows = std::array<std::uint8_t, kGlyphHeight>;

constexpr Rows kDigits[10] = {
    {0x0E, 0x11, 0x13, 0x15, 0x19, 0x11, 0x0E},  // 0
    {0x04, 0x0C, 0x04, 0x04, 0x04, 0x04, 0x0E},  // 1
    {0x0E, 0x11, 0x01, 0x02, 0x04, 0x08, 0x1F},  // 2
    {0x1F, 0x02, 0x04, 0x02, 0x01, 0x11, 0x0E},  // 3
    {0x02, 0x06, 0x0A, 0x12, 0x1F, 0x02, 0x02},  // 4
    {0x1F, 0x10, 0x1E, 0x01, 0x01, 0x11, 0x0E},  // 5
    {0x06, 0x08, 0x10, 0x1E, 0x11, 0x11, 0x0E},  // 6
    {0x1F, 0x01, 0x02, 0x04, 0x08, 0x08, 0x08},  // 7
    {0x0E, 0x11, 0x11, 0x0E, 0x11, 0x11, 0x0E},  // 8
    {0x0E, 0x11, 0x11, 0x0F, 0x01, 0x02, 0x0C},  // 9
};

constexpr Rows kLetters[26] = {
    {0x0E, 0x11, 0x11, 0x1F, 0x11, 0x11, 0x11},  // A
    {0x1E, 0x11, 0x11, 0x1E, 0x11, 0x11, 0x1E},  // B
    {0x0E, 0x11, 0x10, 0x10, 0x10, 0x11, 0x0E},  // C
    {0x1C, 0x12, 0x11, 0x11, 0x11, 0x12, 0x1C},  // D
    {0x1F, 0x10, 0x10, 0x1E, 0x10, 0x10, 0x1F},  // E
    {0x1F, 0x10, 0x10, 0x1E, 0x10, 0x10, 0x10},  // F
    {0x0E, 0x11, 0x10, 0x17, 0x11, 0x11, 0x0F},  // G
    {0x11, 0x11, 0x11, 0x1F, 0x11, 0x11, 0x11},  // H
    {0x0E, 0x04, 0x04, 0x04, 0x04, 0x04, 0x0E},  // I
    {0x07, 0x02, 0x02, 0x02, 0x02, 0x12, 0x0C},  // J
    {0x11, 0x12, 0x14, 0x18, 0x14, 0x12, 0x11},  // K
    {0x10, 0x10, 0x10, 0x10, 0x10, 0x10, 0x1F},  // L
    {0x11, 0x1B, 0x15, 0x15, 0x11, 0x11, 0x11},  // M
    {0x11, 0x11, 0x19, 0x15, 0x13, 0x11, 0x11},  // N
    {0x0E, 0x11, 0x11, 0x11, 0x11, 0x11, 0x0E},  // O
    {0x1E, 0x11, 0x11, 0x1E, 0x10, 0x10, 0x10},  // P
    {0x0E, 0x11, 0x11, 0x11, 0x15, 0x12, 0x0D},  // Q
    {0x1E, 0x11, 0x11, 0x1E, 0x14, 0x12, 0x11},  // R
    {0x0F, 0x10, 0x10, 0x0E, 0x01, 0x01, 0x1E},  // S
    {0x1F, 0x04, 0x04, 0x04, 0x04, 0x04, 0x04},  // T
    {0x11, 0x11, 0x11, 0x11, 0x11, 0x11, 0x0E},  // U
    {0x11, 0x11, 0x11, 0x11, 0x11, 0x0A, 0x04},  // V
    {0x11, 0x11, 0x11, 0x15, 0x15, 0x15, 0x0A},  // W
    {0x11, 0x11, 0x0A, 0x04, 0x0A, 0x11, 0x11},  // X
    {0x11, 0x11, 0x11, 0x0A, 0x04, 0x04, 0x04},  // Y
    {0x1F, 0x01, 0x02, 0x04, 0x08, 0x10, 0x1F},  // Z
};

}  // namespace

std::optional<Rows> glyph_rows(char c) {
  if (c >= '0' && c <= '9') return kDigits[c - '0'];
  if (c >= 'A' && c <= 'Z') return kLetters[c - 'A'];
  return std::nullopt;
}

bool has_glyph(char c) { return glyph_rows(c).has_value(); }

int text_width(std::string_view text) {
  return text.empty() ? 0 : static_cast<int>(text.size()) * kGlyphPitch - (kGlyphPitch - kGlyphWidth);
}

void draw_text(Image& image, int x, int y, std::string_view text, std::uint8_t ink) {
  for (std::size_t i = 0; i < text.size(); ++i) {
    const auto rows = glyph_rows(text[i]);
    if (!rows) throw std::invalid_argument(std::string("no glyph for '") + text[i] + "'");
    const int gx = x + static_cast<int>(i) * kGlyphPitch;
    for (int r = 0; r < kGlyphHeight; ++r) {
      for (int col = 0; col < kGlyphWidth; ++col) {
        if (!(((*rows)[r] >> (kGlyphWidth - 1 - col)) & 1)) continue;
        if (!image.contains(y + r, gx + col)) continue;
        for (int ch = 0; ch < image.channels; ++ch) image.at(y + r, gx + col, ch) = ink;
      }
    }
  }
}

Charset::Charset(std::vector<char> symbols) : symbols_(std::move(symbols)) {
  for (std::size_t i = 0; i < symbols_.size(); ++i) {
    if (!has_glyph(symbols_[i])) {
      throw std::invalid_argument(std::string("charset symbol '") + symbols_[i] + "' has no glyph");
    }
    if (std::find(symbols_.begin(), symbols_.begin() + static_cast<std::ptrdiff_t>(i),
                  symbols_[i]) != symbols_.begin() + static_cast<std::ptrdiff_t>(i)) {
      throw std::invalid_argument(std::string("duplicate charset symbol '") + symbols_[i] + "'");
    }
  }
}

Charset Charset::digits() { return from_spec("0-9"); }
Charset Charset::alphanumeric() { return from_spec("0-9A-Z"); }

Charset Charset::from_spec(std::string_view spec) {
  std::vector<char> out;
  for (std::size_t i = 0; i < spec.size(); ++i) {
    if (i + 2 < spec.size() && spec[i + 1] == '-') {
      if (spec[i + 2] < spec[i]) throw std::invalid_argument("charset: descending range");
      for (char c = spec[i]; c <= spec[i + 2]; ++c) out.push_back(c);
      i += 2;
    } else {
      out.push_back(spec[i]);
    }
  }
  return Charset(std::move(out));
}

int Charset::index_of(char c) const {
  auto it = std::find(symbols_.begin(), symbols_.end(), c);
  if (it == symbols_.end()) throw std::invalid_argument(std::string("symbol '") + c + "' not in charset");
  return static_cast<int>(it - symbols_.begin()) + 1;
}

SeqLabel Charset::encode(std::string_view text) const {
  SeqLabel label;
  label.symbols.reserve(text.size());
  for (char c : text) label.symbols.push_back(index_of(c));
  return label;
}

std::string Charset::decode(const SeqLabel& label) const {
  std::string out;
  for (int s : label.symbols) {
    if (s < 1 || static_cast<std::size_t>(s) > symbols_.size()) {
      throw std::invalid_argument("class index " + std::to_string(s) + " outside charset");
    }
    out.push_back(symbols_[static_cast<std::size_t>(s) - 1]);
  }
  return out;
}

}  // namespace ppocr
