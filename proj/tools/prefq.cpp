#include "prefq/prefq.hpp"
#include "prefq/service.hpp"

#include <CLI11.hpp>

#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace {

prefq::Service* g_service = nullptr;

void on_signal(int)
{
    if (g_service)
        g_service->stop();
}

int run_repl(prefq::Session& session)
{
    std::cout << "prefq: type HELP for commands, QUIT to exit\n";
    std::string line;
    while (std::cout << "prefq> " << std::flush, std::getline(std::cin, line))
    {
        std::string_view t = prefq::detail::trim(line);
        if (t == "quit" || t == "QUIT" || t == "exit" || t == "EXIT")
            break;
        try
        {
            std::cout << session.execute(line);
        }
        catch (const prefq::CommandError& e)
        {
            std::cout << "error: " << e.cause() << "\n";
        }
    }
    return 0;
}

int run_script(prefq::Session& session, const std::string& path)
{
    std::ifstream in(path);
    if (!in)
    {
        std::cerr << "error: cannot open " << path << "\n";
        return 2;
    }
    std::stringstream text;
    text << in.rdbuf();
    session.set_base_dir(std::filesystem::path(path).parent_path().empty() ? std::filesystem::path(".")
                                                                           : std::filesystem::path(path).parent_path());
    try
    {
        std::cout << session.execute(text.str());
    }
    catch (const prefq::CommandError& e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

int run_serve(prefq::Session& session, int port, const std::string& state, const std::string& host)
{
    if (!state.empty() && std::filesystem::exists(state))
    {
        try
        {
            session.load(state);
        }
        catch (const std::exception& e)
        {
            std::cerr << "error: " << e.what() << "\n";
            return 1;
        }
    }
    prefq::Service service(session);
    g_service = &service;
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    if (!service.bind(host, port))
    {
        std::cerr << "error: cannot bind " << host << ":" << port << "\n";
        return 1;
    }
    std::cout << "listening on " << host << ":" << port << std::endl;
    service.listen_after_bind();
    if (!state.empty())
        session.save(state);
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"prefq: preference queries over ERO constraint formulas"};
    app.require_subcommand(1);
    int cap = prefq::kDefaultStageCap;
    app.add_option("--stage-cap", cap, "fixpoint stage cap")->check(CLI::PositiveNumber);

    auto* repl = app.add_subcommand("repl", "interactive session");
    auto* run = app.add_subcommand("run", "execute a command script");
    std::string script;
    run->add_option("script", script, "script file")->required();
    auto* serve = app.add_subcommand("serve", "HTTP service");
    int port = 8080;
    std::string state;
    std::string host = "127.0.0.1";
    serve->add_option("--port", port, "port")->required();
    serve->add_option("--state", state, "session file loaded at start and saved on shutdown");
    serve->add_option("--host", host, "bind address");

    CLI11_PARSE(app, argc, argv);

    prefq::Session session;
    session.set_stage_cap(cap);
    if (*repl)
        return run_repl(session);
    if (*run)
        return run_script(session, script);
    return run_serve(session, port, state, host);
}
