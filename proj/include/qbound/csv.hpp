#pragma once

// Plain-CSV emission with a '#'-prefixed metadata header.  All numeric cells
// go through the same %.12g format so identical runs produce byte-identical
// bodies.

#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

namespace qbound::csv {

inline constexpr const char* artifact_version = "0.1.0";

class Writer {
  public:
    explicit Writer(const std::string& path) : fp_(std::fopen(path.c_str(), "w")) {
        if (!fp_) throw std::runtime_error("cannot open output file: " + path);
    }
    ~Writer() {
        if (fp_) std::fclose(fp_);
    }
    Writer(const Writer&) = delete;
    Writer& operator=(const Writer&) = delete;

    void comment(const std::string& line) { std::fprintf(fp_, "# %s\n", line.c_str()); }
    void raw(const std::string& line) { std::fprintf(fp_, "%s\n", line.c_str()); }

    void row(const std::vector<double>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i)
            std::fprintf(fp_, i + 1 == cells.size() ? "%.12g\n" : "%.12g,",
                         cells[i]);
    }

  private:
    std::FILE* fp_;
};

inline std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

}  // namespace qbound::csv
