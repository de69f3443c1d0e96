#include "ctdne/io.hpp"

#include <zlib.h>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <system_error>

#include "ctdne/types.hpp"

namespace ctdne {

bool has_gz_extension(const std::string& path) {
    return path.size() > 3 && path.compare(path.size() - 3, 3, ".gz") == 0;
}

struct LineReader::Impl {
    std::ifstream plain;
    gzFile gz = nullptr;
    bool use_gz = false;
    std::string pending;

    explicit Impl(const std::string& path) {
        use_gz = has_gz_extension(path);
        if (use_gz) {
            gz = gzopen(path.c_str(), "rb");
            if (!gz) throw DataError("cannot open file: " + path);
        } else {
            plain.open(path);
            if (!plain) throw DataError("cannot open file: " + path);
        }
    }

    ~Impl() {
        if (gz) gzclose(gz);
    }

    bool next(std::string& line) {
        if (!use_gz) {
            if (!std::getline(plain, line)) return false;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            return true;
        }
        line.clear();
        char buf[4096];
        bool got_any = false;
        while (true) {
            if (gzgets(gz, buf, sizeof(buf)) == nullptr) return got_any;
            got_any = true;
            line += buf;
            if (!line.empty() && line.back() == '\n') {
                line.pop_back();
                if (!line.empty() && line.back() == '\r') line.pop_back();
                return true;
            }
        }
    }
};

LineReader::LineReader(const std::string& path) : impl_(std::make_unique<Impl>(path)) {}
LineReader::~LineReader() = default;
LineReader::LineReader(LineReader&&) noexcept = default;
LineReader& LineReader::operator=(LineReader&&) noexcept = default;

bool LineReader::next(std::string& line) { return impl_->next(line); }

struct TextWriter::Impl {
    std::ofstream plain;
    gzFile gz = nullptr;
    bool use_gz = false;
    std::string path;

    explicit Impl(const std::string& p) : path(p) {
        use_gz = has_gz_extension(p);
        if (use_gz) {
            gz = gzopen(p.c_str(), "wb");
            if (!gz) throw DataError("cannot open file for writing: " + p);
        } else {
            plain.open(p);
            if (!plain) throw DataError("cannot open file for writing: " + p);
        }
    }

    ~Impl() { close(); }

    void write(const std::string& chunk) {
        if (use_gz) {
            if (!chunk.empty() &&
                gzwrite(gz, chunk.data(), static_cast<unsigned>(chunk.size())) == 0)
                throw DataError("write failed: " + path);
        } else {
            plain << chunk;
            if (!plain) throw DataError("write failed: " + path);
        }
    }

    void close() {
        if (gz) {
            gzclose(gz);
            gz = nullptr;
        } else if (plain.is_open()) {
            plain.close();
        }
    }
};

TextWriter::TextWriter(const std::string& path) : impl_(std::make_unique<Impl>(path)) {}
TextWriter::~TextWriter() = default;
TextWriter::TextWriter(TextWriter&&) noexcept = default;
TextWriter& TextWriter::operator=(TextWriter&&) noexcept = default;

void TextWriter::write(const std::string& chunk) { impl_->write(chunk); }
void TextWriter::close() { impl_->close(); }

std::string format_double(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    if (ec != std::errc())
        throw InternalError("double formatting failed");
    return std::string(buf, ptr);
}

} // namespace ctdne
