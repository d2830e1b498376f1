#pragma once

#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace tunnelsplit::csv {

// 17 significant digits, '.' separator.
std::string format(double v);

class Writer {
 public:
  explicit Writer(std::ostream& os) : os_(os) {}

  void comment(std::string_view text);
  void header(const std::vector<std::string>& names);
  void row(const std::vector<double>& values);

 private:
  std::ostream& os_;
};

}  // namespace tunnelsplit::csv
