/*
 * (C) Copyright 2026 The ddvar Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "ddvar/output.hpp"

#include <cmath>
#include <cstdio>

namespace ddvar {

std::string format_real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.16e", x);
  return buf;
}

namespace {

std::string quote(std::string_view s) {
  std::string out = "\"";
  for (char ch : s) {
    switch (ch) {
      case '"':
        out += "\\\"";
        break;
      case '\\':
        out += "\\\\";
        break;
      case '\n':
        out += "\\n";
        break;
      case '\t':
        out += "\\t";
        break;
      default:
        if (static_cast<unsigned char>(ch) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", static_cast<unsigned>(static_cast<unsigned char>(ch)));
          out += buf;
        } else {
          out += ch;
        }
    }
  }
  return out + "\"";
}

std::string json_real(double x) { return std::isfinite(x) ? format_real(x) : "null"; }

}  // namespace

void JsonWriter::newline() {
  out_ += '\n';
  out_.append(2 * first_.size(), ' ');
}

void JsonWriter::prefix(std::string_view key) {
  if (!first_.empty()) {
    if (!first_.back()) out_ += ',';
    first_.back() = false;
    newline();
  }
  if (!key.empty()) out_ += quote(key) + ": ";
}

JsonWriter& JsonWriter::begin_object(std::string_view key) {
  prefix(key);
  out_ += '{';
  first_.push_back(true);
  return *this;
}

JsonWriter& JsonWriter::close(char bracket) {
  const bool empty = first_.back();
  first_.pop_back();
  if (!empty) newline();
  out_ += bracket;
  return *this;
}

JsonWriter& JsonWriter::end_object() { return close('}'); }

JsonWriter& JsonWriter::begin_array(std::string_view key) {
  prefix(key);
  out_ += '[';
  first_.push_back(true);
  return *this;
}

JsonWriter& JsonWriter::end_array() { return close(']'); }

JsonWriter& JsonWriter::field(std::string_view key, double value) {
  prefix(key);
  out_ += json_real(value);
  return *this;
}

JsonWriter& JsonWriter::field(std::string_view key, long long value) {
  prefix(key);
  out_ += std::to_string(value);
  return *this;
}

JsonWriter& JsonWriter::field(std::string_view key, unsigned long long value) {
  prefix(key);
  out_ += std::to_string(value);
  return *this;
}

JsonWriter& JsonWriter::field(std::string_view key, bool value) {
  prefix(key);
  out_ += value ? "true" : "false";
  return *this;
}

JsonWriter& JsonWriter::field(std::string_view key, std::string_view value) {
  prefix(key);
  out_ += quote(value);
  return *this;
}

JsonWriter& JsonWriter::field(std::string_view key, const Vector& values) {
  prefix(key);
  out_ += '[';
  for (Index k = 0; k < values.size(); ++k) {
    if (k > 0) out_ += ", ";
    out_ += json_real(values[k]);
  }
  out_ += ']';
  return *this;
}

JsonWriter& JsonWriter::field(std::string_view key, const std::vector<double>& values) {
  return field(key, Vector(Eigen::Map<const Vector>(values.data(), static_cast<Index>(values.size()))));
}

JsonWriter& JsonWriter::field(std::string_view key, const std::vector<Index>& values) {
  prefix(key);
  out_ += '[';
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (k > 0) out_ += ", ";
    out_ += std::to_string(values[k]);
  }
  out_ += ']';
  return *this;
}

JsonWriter& JsonWriter::element(const Vector& values) { return field(std::string_view{}, values); }

void write_decomposition(JsonWriter& w, const Decomposition& dec) {
  w.begin_object("decomposition");
  w.field("np", static_cast<long long>(dec.np()));
  w.field("j_sub", static_cast<unsigned long long>(dec.num_subdomains()));
  w.field("halo", static_cast<long long>(dec.halo()));
  w.begin_array("subdomains");
  for (const IndexRange& r : dec.subdomains()) {
    w.begin_object();
    w.field("begin", static_cast<long long>(r.begin));
    w.field("end", static_cast<long long>(r.end));
    w.end_object();
  }
  w.end_array();
  w.begin_array("interfaces");
  for (std::size_t i = 0; i < dec.num_subdomains(); ++i) {
    for (std::size_t j : dec.neighbors(i)) {
      w.begin_object();
      w.field("i", static_cast<unsigned long long>(i));
      w.field("j", static_cast<unsigned long long>(j));
      w.field("gamma", dec.interface(i, j));
      w.field("overlap", dec.overlap(i, j));
      w.end_object();
    }
  }
  w.end_array();
  w.end_object();
}

std::string history_to_csv(const IterationHistory& history, std::size_t num_subdomains) {
  std::string out = "iter,max_delta,global_cost";
  for (std::size_t i = 1; i <= num_subdomains; ++i) out += ",res_sub_" + std::to_string(i);
  out += '\n';
  for (const IterationRecord& rec : history.records()) {
    out += std::to_string(rec.iter) + ',' + format_real(rec.max_delta) + ',' + format_real(rec.global_cost);
    for (double r : rec.residuals) out += ',' + format_real(r);
    out += '\n';
  }
  return out;
}

}  // namespace ddvar
