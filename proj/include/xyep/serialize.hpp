#pragma once

// Deterministic output writers. Requirements that rule out an off-the-shelf
// dumper: object keys must keep insertion order, every double is printed
// with %.17g (round-trip exact), negative zero is normalized, and reruns of
// the same command must produce byte-identical files.

#include <cmath>
#include <cstdio>
#include <cstdint>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "types.hpp"

namespace xyep {

inline std::string format_g17(double x) {
  if (!std::isfinite(x)) throw numerical_error("non-finite value reached the output layer");
  if (x == 0.0) x = 0.0;  // collapse -0.0
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string format_g6(double x) {
  if (!std::isfinite(x)) throw numerical_error("non-finite value reached the output layer");
  if (x == 0.0) x = 0.0;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

namespace json {

inline std::string escape(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 2);
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out;
}

// small insertion-ordered DOM
class value {
 public:
  static value object() { return value(kind::object_); }
  static value array() { return value(kind::array_); }
  static value str(std::string s) {
    value v(kind::string_);
    v.s_ = std::move(s);
    return v;
  }
  static value num(double d) {
    value v(kind::number_);
    v.d_ = d;
    return v;
  }
  static value integer(long long i) {
    value v(kind::integer_);
    v.i_ = i;
    return v;
  }
  static value boolean(bool b) {
    value v(kind::bool_);
    v.b_ = b;
    return v;
  }

  value& set(const std::string& key, value v) {
    members_.emplace_back(key, std::move(v));
    return *this;
  }
  value& push(value v) {
    items_.push_back(std::move(v));
    return *this;
  }

  void write(std::ostream& os, int indent = 0) const {
    const std::string pad(2 * indent, ' '), pad1(2 * (indent + 1), ' ');
    switch (k_) {
      case kind::object_:
        if (members_.empty()) {
          os << "{}";
          break;
        }
        os << "{\n";
        for (std::size_t i = 0; i < members_.size(); ++i) {
          os << pad1 << '"' << escape(members_[i].first) << "\": ";
          members_[i].second.write(os, indent + 1);
          os << (i + 1 < members_.size() ? ",\n" : "\n");
        }
        os << pad << '}';
        break;
      case kind::array_:
        if (items_.empty()) {
          os << "[]";
          break;
        }
        os << "[\n";
        for (std::size_t i = 0; i < items_.size(); ++i) {
          os << pad1;
          items_[i].write(os, indent + 1);
          os << (i + 1 < items_.size() ? ",\n" : "\n");
        }
        os << pad << ']';
        break;
      case kind::string_: os << '"' << escape(s_) << '"'; break;
      case kind::number_: os << format_g17(d_); break;
      case kind::integer_: os << i_; break;
      case kind::bool_: os << (b_ ? "true" : "false"); break;
    }
  }

  std::string dump() const {
    std::ostringstream os;
    write(os);
    os << '\n';
    return os.str();
  }

 private:
  enum class kind { object_, array_, string_, number_, integer_, bool_ };
  explicit value(kind k) : k_(k) {}
  kind k_;
  std::vector<std::pair<std::string, value>> members_;
  std::vector<value> items_;
  std::string s_;
  double d_ = 0.0;
  long long i_ = 0;
  bool b_ = false;
};

inline value complex_value(cplx z) {
  return value::object().set("re", value::num(z.real())).set("im", value::num(z.imag()));
}

inline value envelope(const std::string& command) {
  return value::object().set("schema", value::integer(1)).set("command", value::str(command));
}

}  // namespace json

// CSV with '#'-prefixed provenance lines before the column header.
class csv_writer {
 public:
  explicit csv_writer(std::ostream& os) : os_(os) {}
  void comment(const std::string& line) { os_ << "# " << line << '\n'; }
  void header(const std::vector<std::string>& cols) { write_cells(cols); }
  void row(const std::vector<std::string>& cells) { write_cells(cells); }

 private:
  void write_cells(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i)
      os_ << cells[i] << (i + 1 < cells.size() ? "," : "");
    os_ << '\n';
  }
  std::ostream& os_;
};

// Minimal standalone SVG figures: a lambda-plane scatter with the unit
// circle for EP censuses, and a grid heatmap for landscapes and phase
// diagrams. Fixed canvas and %.6g coordinates keep output byte-stable.
namespace svg {

struct scatter_point {
  double x = 0.0, y = 0.0;
  std::string color;
};

inline std::string scatter(const std::vector<scatter_point>& pts, double x_min, double x_max,
                           double y_min, double y_max, const std::string& title) {
  const double W = 720.0, H = 720.0, M = 50.0;
  if (!(x_max > x_min)) x_max = x_min + 1.0;
  if (!(y_max > y_min)) y_max = y_min + 1.0;
  auto px = [&](double x) { return M + (x - x_min) / (x_max - x_min) * (W - 2 * M); };
  auto py = [&](double y) { return H - M - (y - y_min) / (y_max - y_min) * (H - 2 * M); };
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"720\" height=\"720\" "
        "viewBox=\"0 0 720 720\">\n";
  os << "<rect width=\"720\" height=\"720\" fill=\"white\"/>\n";
  os << "<text x=\"360\" y=\"28\" text-anchor=\"middle\" font-family=\"monospace\" "
        "font-size=\"15\">"
     << json::escape(title) << "</text>\n";
  // unit circle reference
  os << "<ellipse cx=\"" << format_g6(px(0.0)) << "\" cy=\"" << format_g6(py(0.0)) << "\" rx=\""
     << format_g6(px(1.0) - px(0.0)) << "\" ry=\"" << format_g6(py(0.0) - py(1.0))
     << "\" fill=\"none\" stroke=\"#bbbbbb\" stroke-dasharray=\"4 3\"/>\n";
  // axes through the origin when visible
  if (x_min < 0.0 && x_max > 0.0)
    os << "<line x1=\"" << format_g6(px(0.0)) << "\" y1=\"" << format_g6(py(y_min))
       << "\" x2=\"" << format_g6(px(0.0)) << "\" y2=\"" << format_g6(py(y_max))
       << "\" stroke=\"#dddddd\"/>\n";
  if (y_min < 0.0 && y_max > 0.0)
    os << "<line x1=\"" << format_g6(px(x_min)) << "\" y1=\"" << format_g6(py(0.0))
       << "\" x2=\"" << format_g6(px(x_max)) << "\" y2=\"" << format_g6(py(0.0))
       << "\" stroke=\"#dddddd\"/>\n";
  for (const auto& p : pts)
    os << "<circle cx=\"" << format_g6(px(p.x)) << "\" cy=\"" << format_g6(py(p.y))
       << "\" r=\"4\" fill=\"" << p.color << "\" fill-opacity=\"0.8\"/>\n";
  os << "</svg>\n";
  return os.str();
}

// values row-major iy * nx + ix; colors must map each cell to a fill string
template <class ColorFn>
inline std::string heatmap(int nx, int ny, ColorFn&& color, const std::string& title) {
  const double W = 720.0, H = 720.0, M = 50.0;
  const double cw = (W - 2 * M) / nx, ch = (H - 2 * M) / ny;
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"720\" height=\"720\" "
        "viewBox=\"0 0 720 720\">\n";
  os << "<rect width=\"720\" height=\"720\" fill=\"white\"/>\n";
  os << "<text x=\"360\" y=\"28\" text-anchor=\"middle\" font-family=\"monospace\" "
        "font-size=\"15\">"
     << json::escape(title) << "</text>\n";
  for (int iy = 0; iy < ny; ++iy)
    for (int ix = 0; ix < nx; ++ix)
      os << "<rect x=\"" << format_g6(M + ix * cw) << "\" y=\""
         << format_g6(H - M - (iy + 1) * ch) << "\" width=\"" << format_g6(cw + 0.5)
         << "\" height=\"" << format_g6(ch + 0.5) << "\" fill=\"" << color(ix, iy) << "\"/>\n";
  os << "</svg>\n";
  return os.str();
}

inline std::string gray(double t) {
  if (t < 0.0) t = 0.0;
  if (t > 1.0) t = 1.0;
  const int v = static_cast<int>(std::lround(255.0 * t));
  char buf[16];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", v, v, v);
  return buf;
}

}  // namespace svg

}  // namespace xyep
