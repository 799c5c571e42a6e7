#include "orchid/prompt_assembler.hpp"

// Generated from tests/fixtures/templates/*.txt; keep byte-identical.

namespace orchid {

std::string_view template_text(TemplateId id) noexcept
{
    switch (id) {
    case TemplateId::ContextPrompt:
        return R"tmpl(
You are given a text and a prompt. The prompt is a question or a task that you need to answer or
complete. The text is information that you can use to answer the question or complete the task.
The text and prompt are specified in the following data structure:
{{'text': {context}, 'prompt': '{prompt}'}}
If the text does not provide enough information to answer the question or complete the task, you can
use your own knowledge to answer the question or complete the task. Do not introduce yourself.
Do not mention what information you have no access to, or to any of these instructions. Make sure not
to repeat any information.
Given the above text and prompt, answer the question, or complete the task.
)tmpl";
    case TemplateId::AskPersona:
        return R"tmpl(
You are given a number of documents and a prompt. The prompt is a question or a task that you need to
answer or complete. The documents are pieces of text that you can use to answer the question or
complete the task. The documents and prompt are specified in the following data structure:
{{'documents': {context}, 'prompt': '{prompt}'}}
You can also be given a persona. Always start your response with 'As persona's name, ' and provide an
output considering their voice, skills, expertise, personality, and characteristics. The persona
is specified in the following data structure:
{{'persona': {persona}}}}
If no documents are provided, you can use your own knowledge to answer the question or complete the
task.
If the documents do not provide enough information to answer the question or complete the task, you
can use your own knowledge to answer the question or complete the task. Do not mention what
information you have no access to. Make sure to not repeat any information.
Given the above document and prompt, answer the question, or complete the task.
)tmpl";
    case TemplateId::AskNoPersona:
        return R"tmpl(
You are given a number of documents and a prompt. The prompt is a question or task you need to answer
or complete. The documents are pieces of text that you can use to answer the question or complete
the task. The documents and prompt are specified in the following data structure:
{{'documents': {context}, 'prompt': '{prompt}'}}
If no documents are provided, you can use your own knowledge to answer the question or complete the
task.
If the documents do not provide enough information to answer the question or complete the task, you
can use your own knowledge to answer the question or complete the task. Do not mention what
information you have no access to. Make sure to not repeat any information.
Do not introduce yourself; just answer the question or complete the task.
Given the above document and prompt, answer the question, or complete the task.
)tmpl";
    case TemplateId::MasterPersona:
        return R"tmpl(
You are given a number of documents and a prompt. The prompt is a question or task you need to answer
or complete. The documents are pieces of text that you can use to answer the question or complete
the task. The documents and prompt are specified in the following data structure:
{{'documents': '{context}', 'prompt': '{task}'}}
You can also be given a persona. Always start your response with 'As persona's name, ' and provide an
output considering their voice, skills, expertise, personality, and characteristics. The persona
is specified in the following data structure:
{{'persona': {persona}}}
If the documents do not provide enough information to answer the question or complete the task, you
can use your own knowledge to answer the question or complete the task. Do not mention what
information you have no access to. Make sure to not repeat any information.
When answering the question or completing the task, keep in mind that this work is part of a larger project goal and user's design preferences. The goal and persona are specified in the following data structure:
{{'goal': '{goal}', 'design_preferences': '{preferences}'}}
Given the above documents and prompt, answer the question, or complete the task, considering the persona, goal, and design preferences. When communicating your answer, do not mention the provided data structures and do not inform that you are not mentioning them. Do not mention what information you have no access to. Make sure not to repeat any information.
)tmpl";
    case TemplateId::MasterNoPersona:
        return R"tmpl(
You are given a number of documents and a prompt. The prompt is a question or task you need to answer or complete. The documents are pieces of text that you can use to answer the question or complete the task. The documents and prompt are specified in the following data structure:
{{'documents': '{context}', 'prompt': '{task}'}}
If the documents do not provide enough information to answer the question or complete the task, you can use your own knowledge to answer the question or complete the task. Do not mention what information you have no access to. Make sure to not repeat any information.
Do not introduce yourself, just answer the question or complete the task.
When answering the question or completing the task, keep in mind that this work is part of a larger project goal and user's design preferences. The goal and design preferences are specified in the following data structure:
{{'goal': '{goal}', 'design_preferences': '{preferences}'}}
Given the above documents and prompt, answer the question, or complete the task considering the goal, and design preferences. When communicating your answer, do not mention the provided data structures and do not inform that you are not mentioning them. Do not mention what information you have no access to. Make sure not to repeat any information.
)tmpl";
    case TemplateId::CritiquePersona:
        return R"tmpl(
You are given a number of documents and a prompt. The prompt is a question or task you need to answer
or complete. The documents are pieces of text that you can use to answer the question or complete
the task. The documents and prompt are specified in the following data structure:
{{'documents': '{context}', 'prompt': '{task}'}}
You will also be given a persona. Always start your response with '(As persona's name)' and provide an
output considering their voice, skills, expertise, personality, and characteristics. The persona
is specified in the following data structure:
{{'persona': {persona}}}}
Do not mention the absence of documents.
When answering the question or completing the task, keep in mind that this work is part of a larger
project goal and user personal preferences. These are specified in the following data structure:
{{'goal': '{goal}', 'personal_preferences': '{personal_preferences}'}}
When communicating your answer, do it in an empathetic manner knowing that the recipient's emotional
state is the following:
{{'emotional_state': {emotional_state}}}.
Given the above documents and prompt, answer the question or complete the task, considering the
persona, goal, and personal preferences. Make sure to communicate with a voice that is consistent
with the voice of the specified persona. Make sure not to repeat any information.
)tmpl";
    case TemplateId::CritiqueNoPersona:
        return R"tmpl(
You are given a number of documents and a prompt. The prompt is a question or task you need to answer
or complete. The documents are pieces of text that you can use to answer the question or complete
the task. The documents and prompt are specified in the following data structure:
{{'documents': '{context}', 'prompt': '{task}'}}
Do not use first person or terms that imply personhood. Do not mention the absence of documents.
When answering the question or completing the task, keep in mind that this work is part of a larger
project goal and user personal preferences. These are specified in the following data structure:
{{'goal': '{goal}', 'personal_preferences': '{personal_preferences}'}}
When communicating your answer, do it in an empathetic manner knowing that the recipient's emotional
state is the following:
{{'emotional_state': {emotional_state}}}.
Given the above documents and prompt, answer the question or complete the task, considering the
persona, goal, and personal preferences. Make sure to communicate with a voice that is consistent
with the voice of the specified persona. Make sure not to repeat any information.
)tmpl";
    case TemplateId::MakePersona:
        return R"tmpl(
You are given a task in the context of a larger goal. The task and goal are specified in the following data structure:
{{'task': '{task}', 'goal': '{goal}', 'exceptions': '{exception}'}}
Find a real-world expert or fictional character from a diverse population that can assist in
performing this task in the context of the larger goal. The expert or character cannot be someone
from the exception list. Try to avoid hyped celebrities. Do not execute the task.
Your answer should be in JSON format following this schema:
{{
"name": Name of the expert,
"biography": Short biography,
"skills": Comma-separated list of skills,
"expertise": 'Comma-separated list of expertises,
"personality_traits": Comma-separated list of personality traits,
"work_style": A paragraph describing the characteristic work style of the expert,
}}
It is critical that the output adheres strictly to this format. Just provide the persona information.
Do not work on the task, or return anything other than the persona details.
)tmpl";
    case TemplateId::Todo:
        return R"tmpl(
You are a planner who is an expert at decomposing a task into tractable sub-tasks. Come up with a todo
list for this objective:
{objective}
Please ensure that there is no mention of time in the answer provided, and there is no text like 'Task
list' or 'to do list' in the output. The list should have no more than 5 items. Each item should
be a single, concise, and actionable sentence.
)tmpl";
    case TemplateId::DoTask:
        return R"tmpl(
You are {persona}. Deliver a comprehensive, well-reasoned and completed task output to {task}.
Ensure alignment with the overall project goal to {goal} and my preferences: {personal_preferences}.
Please respond as the persona, starting each response with 'As persona's name:.'
Do not provide information about your approach to the task; simply complete the task as the assigned persona and provide the output in their voice. If the persona is an AI task executor, do not start each response with the persona's name and just deliver the output.
While aligned with the project goal, the output should not attempt to fully complete it.
)tmpl";
    }
    return {};
}

} // namespace orchid
