#include "tunnelsplit/csv.hpp"

#include <charconv>
#include <cmath>

namespace tunnelsplit::csv {

std::string format(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) v = 0.0;  // drop the sign of -0
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

void Writer::comment(std::string_view text) { os_ << "# " << text << '\n'; }

void Writer::header(const std::vector<std::string>& names) {
  for (std::size_t i = 0; i < names.size(); ++i) os_ << (i ? "," : "") << names[i];
  os_ << '\n';
}

void Writer::row(const std::vector<double>& values) {
  for (std::size_t i = 0; i < values.size(); ++i) os_ << (i ? "," : "") << format(values[i]);
  os_ << '\n';
}

}  // namespace tunnelsplit::csv
