import { NmxClient } from "./api.js";
import { FlowController } from "./state.js";
import { mount } from "./app.js";

// Served from the same origin as the API (`nmx serve --static dist`).
const controller = new FlowController(new NmxClient(""));
mount(document.getElementById("app") as HTMLElement, controller);
void controller.start();
