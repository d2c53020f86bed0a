#pragma once

#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "skm/session.hpp"

namespace skm {

enum ExitCode { exit_ok = 0, exit_failed = 1, exit_usage = 2, exit_internal = 3 };

// Runs `skmtool <args...>`; args excludes the program name. The REPL reads
// from `in`. `serve` blocks until the server stops.
int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

// Loopback HTTP front end for Api.
class HttpServer {
public:
    explicit HttpServer(Api& api);
    ~HttpServer();

    // Binds and returns the port (an ephemeral one when port is 0). Throws io.
    int bind(const std::string& host, int port);
    void listen();  // blocks
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace skm
