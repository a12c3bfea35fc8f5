#pragma once
#include <atomic>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>

#include "pecr/engine.hpp"

namespace httplib {
class Server;
}

namespace pecr {

struct ServiceConfig {
    std::string host = "127.0.0.1";
    int port = 8080;
    std::filesystem::path theory_dir;
    MachParams mach;
    std::optional<std::filesystem::path> persist;  // session store file
};

// HTTP/JSON front end over the kernel. handle() is the whole API; the HTTP
// server only forwards to it.
class Service {
public:
    explicit Service(ServiceConfig cfg);
    ~Service();

    struct Response {
        int status = 200;
        std::string body;  // JSON
    };
    Response handle(const std::string& method, const std::string& path, const std::string& body);

    void install(httplib::Server& srv);
    // blocks until stop(); returns false when the address cannot be bound
    bool listen();
    void stop();
    bool running() const;
    int bound_port() const { return bound_port_; }

    void save() const;
    void load();

private:
    struct Entry {
        std::string theory;
        std::shared_ptr<Session> root;
        int64_t version = 1;
        std::string created, modified;
    };

    std::shared_ptr<const Theory> theory(const std::string& name);
    // session for a path id `s3` or `s3.2.0` (line 2, operand 0); parent set for children
    std::shared_ptr<Session> resolve(const std::string& id, Entry*& entry, std::shared_ptr<Session>* parent = nullptr);
    void touch(Entry& e);

    ServiceConfig cfg_;
    mutable std::shared_mutex mu_;
    std::map<std::string, std::shared_ptr<const Theory>> theories_;
    std::map<std::string, std::vector<std::string>> stored_;  // theory -> rule texts added through extract
    std::map<std::string, Entry> sessions_;
    int64_t next_id_ = 1;
    std::unique_ptr<httplib::Server> server_;
    std::atomic<int> bound_port_{0};
};

} // namespace pecr
