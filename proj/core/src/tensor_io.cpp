#include "mcaimem/tensor_io.hpp"

#include <charconv>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>

#include "mcaimem/error.hpp"
#include "mcaimem/io.hpp"

namespace mcaimem {

namespace fs = std::filesystem;

namespace {

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::size_t> parse_shape(const std::string& text, const fs::path& hdr) {
  std::vector<std::size_t> shape;
  std::stringstream ss(text);
  std::string dim;
  while (std::getline(ss, dim, ',')) {
    dim = trim(dim);
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(dim.data(), dim.data() + dim.size(), v);
    if (ec != std::errc{} || ptr != dim.data() + dim.size() || v == 0)
      throw ParseError(hdr.string() + ": bad shape dimension '" + dim + "'");
    shape.push_back(v);
  }
  if (shape.empty()) throw ParseError(hdr.string() + ": empty shape");
  return shape;
}

}  // namespace

std::size_t Int8Tensor::element_count() const {
  if (shape.empty()) return 0;
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

fs::path tensor_header_path(const fs::path& blob) {
  fs::path p = blob;
  p += ".hdr";
  return p;
}

Int8Tensor read_tensor(const fs::path& blob) {
  const fs::path hdr = tensor_header_path(blob);
  std::istringstream header(read_text_file(hdr));
  Int8Tensor t;
  bool saw_dtype = false;
  std::string line;
  while (std::getline(header, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto colon = line.find(':');
    if (colon == std::string::npos) throw ParseError(hdr.string() + ": expected 'key: value', got '" + line + "'");
    const std::string key = trim(line.substr(0, colon));
    const std::string value = trim(line.substr(colon + 1));
    if (key == "dtype") {
      if (value != "int8") throw ParseError(hdr.string() + ": unsupported dtype '" + value + "'");
      saw_dtype = true;
    } else if (key == "shape") {
      t.shape = parse_shape(value, hdr);
    }
  }
  if (!saw_dtype) throw ParseError(hdr.string() + ": missing dtype");
  if (t.shape.empty()) throw ParseError(hdr.string() + ": missing shape");

  const auto bytes = read_binary_file(blob);
  if (bytes.size() != t.element_count())
    throw ParseError(blob.string() + ": " + std::to_string(bytes.size()) + " bytes but shape needs " +
                     std::to_string(t.element_count()));
  t.data.assign(bytes.begin(), bytes.end());
  return t;
}

void write_tensor(const fs::path& blob, const Int8Tensor& t) {
  if (t.data.size() != t.element_count()) throw DomainError("write_tensor: data size does not match shape");
  std::string shape;
  for (std::size_t i = 0; i < t.shape.size(); ++i) shape += (i ? "," : "") + std::to_string(t.shape[i]);
  write_file_atomic(blob, std::string_view(reinterpret_cast<const char*>(t.data.data()), t.data.size()));
  write_file_atomic(tensor_header_path(blob), "dtype: int8\nshape: " + shape + "\n");
}

}  // namespace mcaimem
