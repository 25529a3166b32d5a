import { mount } from "./app";
import "./styles.css";

mount(document.getElementById("app")!);
