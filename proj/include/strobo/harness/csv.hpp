#pragma once

#include <fstream>
#include <string>
#include <string_view>
#include <vector>

namespace strobo::harness {

/// Shortest decimal string that parses back to the same double. nan/inf are
/// written as nan, inf, -inf.
std::string format_double(double x);

namespace schema {
inline constexpr std::string_view accuracy = "model,eps,H,h,scheme,stencil,error";
inline constexpr std::string_view table = "model,eps,h,error";
inline constexpr std::string_view efficiency = "model,eps,method,N_step,error";
inline constexpr std::string_view invariants = "model,eps,macro,t,mass_err,energy_err";
inline constexpr std::string_view modes = "model,eps,method,t,mode_index_x,mode_index_y,magnitude";
}  // namespace schema

/// Writes a header then rows; each row must have as many fields as the header.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, std::string_view header);
  void row(const std::vector<std::string>& fields);
  void close();

 private:
  std::ofstream out_;
  std::string path_;
  std::size_t columns_;
};

}  // namespace strobo::harness
