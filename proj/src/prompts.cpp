#include "docsynth/prompts.hpp"

#include <cctype>

#include "docsynth/errors.hpp"

namespace docsynth::prompts {

const std::string kDocQa =
    "You are a document data visual question-answering dialogue generation "
    "system. Your main task is to design instructions and corresponding answers "
    "based on the OCR layout information of the provided document image, so that "
    "when the obtained multimodal data is used for model training, the model can "
    "fully learn the multimodal document understanding ability.\n"
    "\n"
    "Here is the OCR layout information extracted from a research report document "
    "image: {json_string}. Please imagine that you are looking at the "
    "corresponding image instead of a simple json string based on the content "
    "(text-related characters are recognized by line, please fully splice and "
    "understand it), and then combine the information in the image to design "
    "instructions and answers from the perspective of professional research "
    "report readers.\n"
    "\n"
    "When generating these dialogues, please make sure to follow the following "
    "guidelines:\n"
    "\n"
    "These instructions must meet the following requirements:\n"
    "\n"
    "1. Instructions focus on the ability to extract information from document "
    "images, and the answers can be directly observed from the image.\n"
    "\n"
    "2. Instructions and answers must be highly relevant to the image, and "
    "instructions cannot be answered without the image. If the instruction "
    "provides too much information from the image, so that the instruction can "
    "be answered without the image, it is strictly prohibited.\n"
    "\n"
    "3. The instructions must be generated based on the information in the "
    "image, and the accurate answer can be obtained in combination with the "
    "image content.\n"
    "\n"
    "4. The text characters in the provided OCR layout information contain the "
    "exact answer to the answer. Please strictly ensure that the answer is "
    "correct, otherwise do not generate the instruction and answer.\n"
    "\n"
    "5. For each layout area type (printed text, tables, charts, printed "
    "formulas, seals), if the document contains this type of information, then "
    "please generate instructions based on this type of content, otherwise no "
    "need to generate.\n"
    "\n"
    "6. The answer to the instruction should be as concise and accurate as "
    "possible. Do not repeat the question and reply directly to the answer. At "
    "the same time, ensure that the answer is directly obtained from the "
    "original text of the image, and do not summarize.\n"
    "\n"
    "7. Instructions and questions should not contain information about the "
    "layout structure.\n"
    "\n"
    "8. Instructions should directly give questions, and do not use words such "
    "as 'Please ask', 'Please answer', and 'In the document'.\n"
    "\n"
    "9. When generating instructions related to tables, if the table contains "
    "relevant information such as units, percentages, positive and negative "
    "signs, please ensure the completeness of the answer.\n"
    "\n"
    "Please generate at least 5 Chinese instructions and answers. You need to "
    "provide the generated content in JSON format. Please make sure that "
    "```json``` is included in the output. You can refer to the following "
    "sample to organize your output: {template}.";

const std::string kChartImage =
    "You are a highly intelligent AI familiar with data visualization and "
    "matplotlib.\n"
    "\n"
    "Given the following matplotlib code of an area chart: {code}. Please "
    "generate a diversified version of this matplotlib code of area chart. Here "
    "are some options you should follow:\n"
    "1. Generate data points that fit the chart and the number of data points "
    "should be as much as you can to provide, but you should not skip any data "
    "point in your code. Do not add any comment in your code.\n"
    "2. Add or change some data point with new corresponding values to enrich "
    "the visualization and print the final table data you use in the code "
    "within triple backticks (```), and don't include things like csv, "
    "plaintext in the triple backticks (```).\n"
    "3. Modify the color scheme using specific color codes (e.g., #RRGGBB) for "
    "better clarity or visual appeal. Avoid using color categories.\n"
    "4. Change width and height of the chart reasonably.\n"
    "5. Change the topic, headline, and data type (which fit the topic) of the "
    "chart, put the headline in an appropriate place that does not overlap with "
    "other things (make sure the headline does not overlap with the legend! Put "
    "these two things away), you can refer and choose one (not all) of the "
    "topics from: {topics_pool}, but reduce using global topic, do not use "
    "temperature.\n"
    "6. Generate only an area chart with one column of value, not a stacked "
    "area chart.\n"
    "7. Assign annotation/text label on the chart. Do not use random data.\n"
    "You should choose some of these options, not all of them, to diversify the "
    "visualization.\n"
    "Different data points should have different values.\n"
    "You should give FULL code with ALL data points and don't miss any detail.\n"
    "Make sure the legend appears completely in the chart after the code is "
    "rendered.\n"
    "Print table data first in Chinese, the table data format should be able to "
    "directly write in csv file, then print your code (keep the topic, "
    "headline, and data type (which fit the topic) of the chart in Chinese).\n"
    "Include the code with ``` ``` format.";

const std::string kChartQa =
    "You are a highly intelligent AI familiar with data visualization and "
    "{chart_type}.\n"
    "\n"
    "Below is the matplotlib code for the {chart_type} chart: {code} and the "
    "corresponding table data: {table_data}.\n"
    "\n"
    "Please imagine that you are looking at the image generated by the code, "
    "not the code itself.\n"
    "\n"
    "Please generate questions of different task types based on the content of "
    "the chart.\n"
    "\n"
    "The task type is {task_types}.\n"
    "\n"
    "Remember that in your answer, only the image of the chart is given, and "
    "your answer is based on the image. The table data is the real value of the "
    "relevant numerical value in the image, so make sure the answer is "
    "correct.\n"
    "\n"
    "The value and label of the question are the real basis of your question, "
    "so make sure the answer is correct.\n"
    "\n"
    "Avoid using invalid escape characters in strings.\n"
    "\n"
    "Use approximate color names instead of hexadecimal colors.\n"
    "If there are units, % and other information in the chart, please ensure "
    "the integrity of the units , % and other information in the answer.\n"
    "\n"
    "In addition, I hope to save your output as a json file, so I hope you can "
    "organize your answer like {template}, and make sure the values of human "
    "and gpt in json are all in Chinese.";

const std::string kTableQa =
    "This is a table chart displayed by html code: {html_code}.\n"
    "Please generate questions of different task types about the chart, and "
    "make sure that the answers to the questions can be clearly obtained from "
    "the chart, otherwise you can choose not to select the corresponding "
    "task.\n"
    "\n"
    "The selectable task types and their explanations are as follows:\n"
    "\n"
    "Factoid: Asks a specific fact, the answer comes from a fragment in the "
    "table or a value obtained by aggregation.\n"
    "\n"
    "Free Form: The answer has no fixed format, is usually longer, and is "
    "similar to a conversation, such as ChatGPT.\n"
    "\n"
    "Multiple Choice: The question requires selecting one of multiple options "
    "as an answer.\n"
    "\n"
    "List: The answer requires providing a series of related items, usually "
    "from multiple rows or columns in a table.\n"
    "\n"
    "Yes/No: The answer to the question can only be 'yes' or 'no'.\n"
    "\n"
    "Explanation: The answer requires explaining specific data or trends in "
    "the table.\n"
    "\n"
    "Comparison: The answer requires comparing two or more values in the "
    "table.\n"
    "\n"
    "Causal: The answer requires explaining the causal relationship between "
    "the data in the table.\n"
    "\n"
    "Computation: The answer requires some calculations, such as sum, average, "
    "etc.\n"
    "\n"
    "Classification: According to the question, classify or categorize some "
    "data in the table.\n"
    "\n"
    "Time Series: The answer requires analyzing the time series data in the "
    "table, such as trends, patterns, etc.\n"
    "\n"
    "You need to imagine that you are looking at an image rendered by the "
    "code, not the code itself. Remember in your answer, all you are given is "
    "an image of a graph, and you are answering based on the image.\n"
    "\n"
    "The values and labels are the ground truth of your question, so make sure "
    "the answer is correct.\n"
    "Avoid using invalid escape characters in strings.\n"
    "Also, I want to save your output to a json file, so I want you to "
    "organize your answer like\n"
    "{template} and must include the answer in ```json``` format.";

std::string substitute(const std::string& tpl,
                       const std::map<std::string, std::string>& values) {
  std::string out;
  out.reserve(tpl.size());
  size_t i = 0;
  while (i < tpl.size()) {
    if (tpl[i] != '{') {
      out += tpl[i++];
      continue;
    }
    size_t close = tpl.find('}', i);
    bool name_ok = close != std::string::npos && close > i + 1;
    if (name_ok) {
      for (size_t k = i + 1; k < close && name_ok; ++k)
        name_ok = std::isalnum(static_cast<unsigned char>(tpl[k])) || tpl[k] == '_';
    }
    if (!name_ok) {
      out += tpl[i++];
      continue;
    }
    std::string name = tpl.substr(i + 1, close - i - 1);
    auto it = values.find(name);
    if (it == values.end() || it->second.empty())
      throw Error("placeholder {" + name + "} unfilled");
    out += it->second;
    i = close + 1;
  }
  return out;
}

}  // namespace docsynth::prompts
