#pragma once

// Wires the deterministic renderers for every prompt role into one backend.
// Each renderer echoes the locally computed result the caller placed in the
// request payload, so runs are reproducible without any network.

#include "uitrans/generator.hpp"
#include "uitrans/llm_gateway.hpp"
#include "uitrans/reflector.hpp"
#include "uitrans/task_planner.hpp"

namespace uitrans {

inline std::string template_echo_renderer(const GenerationRequest& req) {
    if (!req.payload.is_object() || !req.payload.contains("text")) {
        throw PayloadIncomplete("payload.text");
    }
    return req.payload["text"].get<std::string>();
}

inline TemplateBackend make_template_backend() {
    TemplateBackend backend;
    backend.set_renderer(Role::generate, template_generate_renderer);
    backend.set_renderer(Role::describe, template_describe_renderer);
    backend.set_renderer(Role::reflect, template_reflect_renderer);
    backend.set_renderer(Role::parse_assist, template_echo_renderer);
    backend.set_renderer(Role::assemble, template_echo_renderer);
    return backend;
}

}  // namespace uitrans
