#include "setomo/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace setomo {

json grid_to_json(const ModeGrid& grid) {
  return json{{"center", grid.center()}, {"span", grid.span()}, {"n", grid.size()}};
}

ModeGrid grid_from_json(const json& j) {
  try {
    return ModeGrid(j.at("center").get<double>(), j.at("span").get<double>(), j.at("n").get<int>());
  } catch (const json::exception& e) {
    fail(ErrorKind::kInvalidArgument, std::string("malformed grid: ") + e.what());
  }
}

json field1d_to_json(const Field1D& f) {
  json re = json::array();
  json im = json::array();
  for (const cplx& v : f.values) {
    re.push_back(v.real());
    im.push_back(v.imag());
  }
  return json{{"grid", grid_to_json(f.grid)}, {"re", std::move(re)}, {"im", std::move(im)}};
}

Field1D field1d_from_json(const json& j) {
  const ModeGrid grid = grid_from_json(j.at("grid"));
  const auto& re = j.at("re");
  const auto& im = j.at("im");
  if (re.size() != static_cast<std::size_t>(grid.size()) || im.size() != re.size()) {
    fail(ErrorKind::kInvalidArgument, "field length does not match its grid");
  }
  Field1D f(grid);
  for (int i = 0; i < grid.size(); ++i) {
    f[i] = cplx(re[static_cast<std::size_t>(i)].get<double>(), im[static_cast<std::size_t>(i)].get<double>());
  }
  return f;
}

json field2d_to_json(const Field2D& f) {
  json re = json::array();
  json im = json::array();
  for (int i = 0; i < f.rows(); ++i) {
    json row_re = json::array();
    json row_im = json::array();
    for (int j = 0; j < f.cols(); ++j) {
      row_re.push_back(f(i, j).real());
      row_im.push_back(f(i, j).imag());
    }
    re.push_back(std::move(row_re));
    im.push_back(std::move(row_im));
  }
  return json{{"grid_s", grid_to_json(f.grid_s())},
              {"grid_i", grid_to_json(f.grid_i())},
              {"re", std::move(re)},
              {"im", std::move(im)}};
}

Field2D field2d_from_json(const json& j) {
  try {
    Field2D f(grid_from_json(j.at("grid_s")), grid_from_json(j.at("grid_i")));
    const auto& re = j.at("re");
    const auto& im = j.at("im");
    if (re.size() != static_cast<std::size_t>(f.rows()) || im.size() != re.size()) {
      fail(ErrorKind::kInvalidArgument, "kernel row count does not match grid_s");
    }
    for (int r = 0; r < f.rows(); ++r) {
      const auto& row_re = re[static_cast<std::size_t>(r)];
      const auto& row_im = im[static_cast<std::size_t>(r)];
      if (row_re.size() != static_cast<std::size_t>(f.cols()) || row_im.size() != row_re.size()) {
        fail(ErrorKind::kInvalidArgument, "kernel row length does not match grid_i");
      }
      for (int c = 0; c < f.cols(); ++c) {
        f(r, c) = cplx(row_re[static_cast<std::size_t>(c)].get<double>(),
                       row_im[static_cast<std::size_t>(c)].get<double>());
      }
    }
    return f;
  } catch (const json::exception& e) {
    fail(ErrorKind::kInvalidArgument, std::string("malformed kernel: ") + e.what());
  }
}

namespace {

std::string format_17(double x) {
  if (!std::isfinite(x)) fail(ErrorKind::kNumeric, "cannot serialize a non-finite number");
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

void dump_rec(const json& j, int indent, int depth, std::string& out) {
  const auto newline = [&](int d) {
    if (indent <= 0) return;
    out += '\n';
    out.append(static_cast<std::size_t>(indent * d), ' ');
  };
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        newline(depth + 1);
        out += json(it.key()).dump();
        out += indent > 0 ? ": " : ":";
        dump_rec(it.value(), indent, depth + 1, out);
      }
      newline(depth);
      out += '}';
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // Arrays of scalars stay on one line; nested containers get their own lines.
      const bool flat = !j.front().is_structured();
      out += '[';
      bool first = true;
      for (const auto& v : j) {
        if (!first) out += ',';
        first = false;
        if (!flat) newline(depth + 1);
        dump_rec(v, indent, depth + 1, out);
      }
      if (!flat) newline(depth);
      out += ']';
      return;
    }
    case json::value_t::number_float:
      // JSON has no NaN or infinity.
      out += std::isfinite(j.get<double>()) ? format_17(j.get<double>()) : "null";
      return;
    default:
      out += j.dump();
      return;
  }
}

}  // namespace

std::string dump_json(const json& j, int indent) {
  std::string out;
  dump_rec(j, indent, 0, out);
  out += '\n';
  return out;
}

std::string format_shortest(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::kConfig, "cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return json::parse(ss.str());
  } catch (const json::parse_error& e) {
    fail(ErrorKind::kConfig, path.string() + ": " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::kConfig, "cannot write " + path.string());
  out << text;
}

}  // namespace setomo
