#pragma once

#include "modelcard/text.hpp"

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include <sys/wait.h>
#include <unistd.h>

namespace testing_support {

namespace fs = std::filesystem;

inline fs::path fixtures_dir() { return fs::path(MODELCARD_FIXTURES_DIR); }

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    TempDir()
    {
        static std::atomic<int> counter{0};
        path_ = fs::temp_directory_path() /
                ("modelcard-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        fs::remove_all(path_);
        fs::create_directories(path_);
    }
    ~TempDir()
    {
        std::error_code ec;
        fs::permissions(path_, fs::perms::owner_all, fs::perm_options::add, ec);
        fs::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const fs::path& path() const { return path_; }
    fs::path operator/(std::string_view rel) const { return path_ / rel; }

private:
    fs::path path_;
};

/// Copies a fixture project (config + logs) so tests may write next to it.
inline fs::path copy_fixture(std::string_view name, const fs::path& into)
{
    const fs::path dst = into / name;
    fs::copy(fixtures_dir() / name, dst, fs::copy_options::recursive);
    return dst;
}

inline void write(const fs::path& p, std::string_view bytes) { modelcard::text::write_file_atomic(p, bytes); }

inline std::size_t count_occurrences(std::string_view hay, std::string_view needle)
{
    std::size_t n = 0;
    for (auto pos = hay.find(needle); pos != std::string_view::npos; pos = hay.find(needle, pos + needle.size())) ++n;
    return n;
}

struct CommandResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

/// Runs a shell command, capturing stdout and stderr through temp files.
inline CommandResult run_command(const std::string& cmd)
{
    TempDir tmp;
    const fs::path out = tmp / "stdout", err = tmp / "stderr";
    const std::string full = cmd + " >" + out.string() + " 2>" + err.string();
    const int status = std::system(full.c_str());
    CommandResult r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = modelcard::text::read_file(out);
    r.err = modelcard::text::read_file(err);
    return r;
}

inline std::string quote(const fs::path& p) { return "'" + p.string() + "'"; }

} // namespace testing_support

namespace testing_support {

/// src=/href= values (and CSS url()) that are neither data URIs nor fragment
/// anchors; an empty result means the document loads nothing external.
inline std::vector<std::string> external_references(std::string_view html)
{
    std::vector<std::string> out;
    for (std::string_view attr : {"src=", "href=", "url("}) {
        for (auto pos = html.find(attr); pos != std::string_view::npos; pos = html.find(attr, pos + 1)) {
            auto v = pos + attr.size();
            if (v < html.size() && (html[v] == '"' || html[v] == '\'')) ++v;
            const auto value = html.substr(v, 64);
            if (value.starts_with("data:") || value.starts_with("#")) continue;
            out.emplace_back(html.substr(pos, 80));
        }
    }
    return out;
}

} // namespace testing_support
