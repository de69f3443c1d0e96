#pragma once

#include <memory>
#include <string>

namespace ctdne {

// Line-oriented reader over plain text or gzip files (picked by .gz extension).
class LineReader {
public:
    explicit LineReader(const std::string& path);
    ~LineReader();
    LineReader(LineReader&&) noexcept;
    LineReader& operator=(LineReader&&) noexcept;

    // Reads the next line without the trailing newline; false at EOF.
    bool next(std::string& line);

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// Buffered writer with the same .gz convention as LineReader.
class TextWriter {
public:
    explicit TextWriter(const std::string& path);
    ~TextWriter();
    TextWriter(TextWriter&&) noexcept;
    TextWriter& operator=(TextWriter&&) noexcept;

    void write(const std::string& chunk);
    void close();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

bool has_gz_extension(const std::string& path);

// Shortest decimal rendering that round-trips the exact double.
std::string format_double(double value);

} // namespace ctdne
